//! Built-in symplectic Lie pairs. Everything except the abelian pair is
//! constructed from a Lie algebra and a form rather than typed in.

use crate::connections::{coadjoint_pair, presymplectic_to_pair, trace_form, SymplecticForm};
use crate::error::{Error, Result};
use crate::liepair::{sl, LieAlgebra, LiePair};
use crate::linalg::Matrix;
use crate::scalar::{int, Scalar};

#[derive(Debug, Clone)]
pub struct Example {
    pub name: &'static str,
    pub pair: LiePair,
    pub omega: SymplecticForm,
    pub note: &'static str,
}

pub const NAMES: [&str; 5] = ["abelian4", "heisenberg", "sl2-nilp", "sl3-min", "sl4-min"];

pub fn names() -> &'static [&'static str] {
    &NAMES
}

pub fn get(name: &str) -> Result<Example> {
    match name {
        "abelian4" => abelian4(),
        "heisenberg" => heisenberg(),
        "sl2-nilp" => sl2_nilp(),
        "sl3-min" => sl3_min(),
        "sl4-min" => sl4_min(),
        _ => Err(Error::Parse(format!("unknown example \"{name}\"; known: {}", NAMES.join(", ")))),
    }
}

pub fn all() -> Result<Vec<Example>> {
    NAMES.iter().map(|n| get(n)).collect()
}

fn standard_omega() -> Result<SymplecticForm> {
    SymplecticForm::new(Matrix::from_rows(vec![vec![int(0), int(1)], vec![int(-1), int(0)]])?)
}

/// Abelian `g` of dimension 4, `h` the first two basis vectors.
pub fn abelian4() -> Result<Example> {
    Ok(Example {
        name: "abelian4",
        pair: LiePair::new(LieAlgebra::abelian(4), 2)?,
        omega: standard_omega()?,
        note: "abelian g = K^4, h = span(e0, e1), standard form on the quotient",
    })
}

/// Heisenberg algebra `[x, y] = z` reduced along `Ω = x* ∧ y*`; basis `(z, x, y)`.
pub fn heisenberg() -> Result<Example> {
    let mut alg = LieAlgebra::abelian(3);
    alg.set_bracket(0, 1, [(2, int(1))].into_iter().collect());
    let mut big = Matrix::zeros(3, 3);
    big[(0, 1)] = int(1);
    big[(1, 0)] = int(-1);
    let red = presymplectic_to_pair(&alg, &big)?;
    Ok(Example {
        name: "heisenberg",
        pair: red.pair,
        omega: red.omega,
        note: "Heisenberg algebra [x,y]=z with h = span(z) = ker(x*^y*); basis (z, x, y)",
    })
}

fn coadjoint(n: usize, x: usize) -> Result<(LiePair, SymplecticForm)> {
    let (alg, basis) = sl(n)?;
    let k = trace_form(&basis)?;
    let mut v = vec![Scalar::from_integer(0.into()); alg.dim()];
    v[x] = int(1);
    let red = coadjoint_pair(&alg, &v, &k)?;
    Ok((red.pair, red.omega))
}

/// `sl(2)` with `h` the centralizer of the nilpotent `e = E12`.
pub fn sl2_nilp() -> Result<Example> {
    let (pair, omega) = coadjoint(2, 0)?;
    Ok(Example {
        name: "sl2-nilp",
        pair,
        omega,
        note: "sl(2), h = centralizer of e = E12, omega(a,b) = tr(e [a,b])",
    })
}

/// `sl(3)` with `h` the centralizer of the highest root vector `E13`.
pub fn sl3_min() -> Result<Example> {
    let (pair, omega) = coadjoint(3, 1)?;
    Ok(Example {
        name: "sl3-min",
        pair,
        omega,
        note: "sl(3), h = centralizer of E13 (minimal nilpotent orbit), omega(a,b) = tr(E13 [a,b])",
    })
}

/// `sl(4)` with `h` the centralizer of the highest root vector `E14`.
pub fn sl4_min() -> Result<Example> {
    let (pair, omega) = coadjoint(4, 2)?;
    Ok(Example {
        name: "sl4-min",
        pair,
        omega,
        note: "sl(4), h = centralizer of E14 (minimal nilpotent orbit), omega(a,b) = tr(E14 [a,b])",
    })
}
