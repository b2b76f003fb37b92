//! The canonical qutrit magic states and the plain-text state file format.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::matrix::{c, check_state, pure_density, tensor_power, CMat, DimSpec};

/// Names of the built-in states. All live on a single qutrit; tensor powers
/// are taken via the `copies` argument of [`named_state`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateName {
    /// `|S> = (|1> - |2>) / sqrt(2)`.
    Strange,
    /// `|N> = (-|0> + 2|1> - |2>) / sqrt(6)`.
    Norrell,
    /// `|T> = (e^{2 pi i/9}|0> + |1> + e^{-2 pi i/9}|2>) / sqrt(3)`.
    TMagic,
    /// The +1 eigenstate of the dimension-3 Fourier matrix.
    HMagic,
    /// Computational basis state `|k>`.
    Basis(usize),
    /// `I / 3`.
    MaximallyMixed,
}

impl FromStr for StateName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strange" => Ok(Self::Strange),
            "norrell" => Ok(Self::Norrell),
            "tmagic" => Ok(Self::TMagic),
            "hmagic" => Ok(Self::HMagic),
            "maximally_mixed" => Ok(Self::MaximallyMixed),
            other => {
                if let Some(k) = other.strip_prefix("basis_") {
                    let k: usize = k
                        .parse()
                        .map_err(|_| Error::UnknownState(other.to_string()))?;
                    if k < 3 {
                        return Ok(Self::Basis(k));
                    }
                }
                Err(Error::UnknownState(other.to_string()))
            }
        }
    }
}

impl fmt::Display for StateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Strange => write!(f, "strange"),
            Self::Norrell => write!(f, "norrell"),
            Self::TMagic => write!(f, "tmagic"),
            Self::HMagic => write!(f, "hmagic"),
            Self::Basis(k) => write!(f, "basis_{k}"),
            Self::MaximallyMixed => write!(f, "maximally_mixed"),
        }
    }
}

/// Unitary discrete Fourier matrix `[w^{jk} / sqrt(d)]`.
pub fn fourier_matrix(d: usize) -> CMat {
    let scale = 1.0 / (d as f64).sqrt();
    CMat::from_fn(d, d, |j, k| {
        c(0.0, 2.0 * std::f64::consts::PI * (j * k) as f64 / d as f64).exp() * scale
    })
}

fn strange_vector() -> Vec<Complex<f64>> {
    let s = 1.0 / 2f64.sqrt();
    vec![c(0.0, 0.0), c(s, 0.0), c(-s, 0.0)]
}

fn norrell_vector() -> Vec<Complex<f64>> {
    let s = 1.0 / 6f64.sqrt();
    vec![c(-s, 0.0), c(2.0 * s, 0.0), c(-s, 0.0)]
}

fn tmagic_vector() -> Vec<Complex<f64>> {
    let s = 1.0 / 3f64.sqrt();
    let phi = 2.0 * std::f64::consts::PI / 9.0;
    vec![
        c(0.0, phi).exp() * s,
        c(s, 0.0),
        c(0.0, -phi).exp() * s,
    ]
}

/// The +1 eigenvector of `QFT_3`, phase-fixed so the first nonzero amplitude
/// is real positive.
///
/// Computed from the spectral projector `(I + F + F^2 + F^3) / 4`, which is
/// Hermitian because `F^4 = I`. Fails loudly if the eigenspace is not
/// one-dimensional within `1e-8`.
fn hmagic_vector() -> Result<Vec<Complex<f64>>> {
    let f = fourier_matrix(3);
    let f2 = &f * &f;
    let f3 = &f2 * &f;
    let proj = (CMat::identity(3, 3) + &f + f2 + f3) / c(4.0, 0.0);
    let tr = proj.trace();
    if (tr.re - 1.0).abs() > 1e-8 {
        return Err(Error::DegenerateEigenspace);
    }
    let eig = proj.symmetric_eigen();
    let (kmax, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    if (eig.eigenvalues[kmax] - 1.0).abs() > 1e-8 {
        return Err(Error::DegenerateEigenspace);
    }
    let col = eig.eigenvectors.column(kmax);
    let mut v: Vec<Complex<f64>> = col.iter().copied().collect();
    let first = v
        .iter()
        .find(|z| z.norm() > 1e-10)
        .copied()
        .ok_or(Error::DegenerateEigenspace)?;
    let phase = first / first.norm();
    for z in &mut v {
        *z /= phase;
    }
    Ok(v)
}

/// Density operator of a named state's `copies`-fold tensor power, together
/// with its dimension spec.
pub fn named_state(name: StateName, copies: usize) -> Result<(CMat, DimSpec)> {
    if copies == 0 {
        return Err(Error::Domain("copies must be at least 1".into()));
    }
    let single = match name {
        StateName::Strange => pure_density(&strange_vector()),
        StateName::Norrell => pure_density(&norrell_vector()),
        StateName::TMagic => pure_density(&tmagic_vector()),
        StateName::HMagic => pure_density(&hmagic_vector()?),
        StateName::Basis(k) => crate::matrix::basis_density(3, k),
        StateName::MaximallyMixed => CMat::identity(3, 3) / c(3.0, 0.0),
    };
    let dims = DimSpec::single(3)?.repeat(copies)?;
    Ok((tensor_power(&single, copies), dims))
}

/// Parses the plain-text state format:
///
/// ```text
/// dims 3 3
/// kind vector|density
/// <rows of whitespace-separated re:im pairs>
/// ```
///
/// A `vector` body is a single line of amplitudes; a `density` body has one
/// matrix row per line. Rejects non-odd dimensions and non-normalized
/// inputs (tolerance 1e-6).
pub fn parse_state(text: &str) -> Result<(CMat, DimSpec)> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));

    let dims_line = lines.next().ok_or_else(|| Error::Parse("empty file".into()))?;
    let mut parts = dims_line.split_whitespace();
    if parts.next() != Some("dims") {
        return Err(Error::Parse("first line must start with 'dims'".into()));
    }
    let dims: Vec<usize> = parts
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad dimension '{t}'"))))
        .collect::<Result<_>>()?;
    let dims = DimSpec::new(dims)?;
    let d = dims.total_dim();

    let kind_line = lines.next().ok_or_else(|| Error::Parse("missing kind line".into()))?;
    let kind = kind_line
        .strip_prefix("kind")
        .map(str::trim)
        .ok_or_else(|| Error::Parse("second line must start with 'kind'".into()))?;

    let parse_entry = |tok: &str| -> Result<Complex<f64>> {
        let (re, im) = tok
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("entry '{tok}' is not re:im")))?;
        let re: f64 = re.parse().map_err(|_| Error::Parse(format!("bad real part '{re}'")))?;
        let im: f64 = im.parse().map_err(|_| Error::Parse(format!("bad imag part '{im}'")))?;
        Ok(c(re, im))
    };

    let body: Vec<Vec<Complex<f64>>> = lines
        .map(|l| l.split_whitespace().map(parse_entry).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;

    let rho = match kind {
        "vector" => {
            if body.len() != 1 || body[0].len() != d {
                return Err(Error::Parse(format!(
                    "vector state needs one line of {d} amplitudes"
                )));
            }
            let norm: f64 = body[0].iter().map(|z| z.norm_sqr()).sum();
            if (norm - 1.0).abs() > 1e-6 {
                return Err(Error::Parse(format!(
                    "vector is not normalized (norm^2 = {norm})"
                )));
            }
            pure_density(&body[0])
        }
        "density" => {
            if body.len() != d || body.iter().any(|r| r.len() != d) {
                return Err(Error::Parse(format!("density state needs {d} rows of {d} entries")));
            }
            CMat::from_fn(d, d, |i, j| body[i][j])
        }
        other => return Err(Error::Parse(format!("unknown kind '{other}'"))),
    };

    check_state(&rho, &dims).map_err(|e| Error::Parse(e.to_string()))?;
    Ok((rho, dims))
}

pub fn read_state_file(path: &Path) -> Result<(CMat, DimSpec)> {
    let text = std::fs::read_to_string(path)?;
    parse_state(&text)
}

/// Serializes a density operator in the state file format.
pub fn format_density(rho: &CMat, dims: &DimSpec) -> String {
    let mut out = String::from("dims");
    for d in dims.dims() {
        out.push_str(&format!(" {d}"));
    }
    out.push_str("\nkind density\n");
    for i in 0..rho.nrows() {
        let row: Vec<String> = (0..rho.ncols())
            .map(|j| format!("{:.17}:{:.17}", rho[(i, j)].re, rho[(i, j)].im))
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
