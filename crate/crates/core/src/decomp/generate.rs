//! Seeded random instances that satisfy the uniqueness hypotheses with
//! margin: pairwise overlaps at most `1 − 10³·ε_col` and condition number of
//! independent sets at most `10⁶`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{random_complex_vector, random_phase, random_unitary, svd};
use crate::subspace::{stack, ToleranceConfig};
use crate::tensor::{
    FactoredDims, Ket, ProductDecomposition, ProductTerm, TriDecomposition, TriTerm,
};
use crate::C64;

const MAX_CONDITION: f64 = 1e6;
const MAX_DRAWS: usize = 1000;

/// Which ket sets of a generated bipartite instance are independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Profile {
    BothIndependent,
    AIndependentOnly,
    BIndependentOnly,
}

impl Profile {
    pub const ALL: [Profile; 3] = [
        Profile::BothIndependent,
        Profile::AIndependentOnly,
        Profile::BIndependentOnly,
    ];
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::BothIndependent => "both-independent",
            Profile::AIndependentOnly => "a-independent-only",
            Profile::BIndependentOnly => "b-independent-only",
        })
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both-independent" => Ok(Profile::BothIndependent),
            "a-independent-only" => Ok(Profile::AIndependentOnly),
            "b-independent-only" => Ok(Profile::BIndependentOnly),
            other => Err(Error::Infeasible(format!("unknown profile '{other}'"))),
        }
    }
}

fn max_overlap(set: &[Ket]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            worst = worst.max(set[i].inner(&set[j]).norm());
        }
    }
    worst
}

fn condition(set: &[Ket]) -> f64 {
    let s = svd(&stack(set)).s;
    s[0] / s[s.len() - 1]
}

/// `n` linearly independent unit kets in `C^dim`.
fn independent_set<R: Rng>(rng: &mut R, n: usize, dim: usize) -> Result<Vec<Ket>> {
    let overlap_cap = 1.0 - 1e3 * ToleranceConfig::default().collinear;
    for _ in 0..MAX_DRAWS {
        let set: Vec<Ket> = (0..n)
            .map(|_| Ket::new(random_complex_vector(rng, dim)))
            .collect::<Result<_>>()?;
        if max_overlap(&set) <= overlap_cap && condition(&set) <= MAX_CONDITION {
            return Ok(set);
        }
    }
    Err(Error::Infeasible(format!(
        "no well-conditioned set of {n} kets in dimension {dim}"
    )))
}

/// `n` non-collinear unit kets confined to a random subspace of dimension
/// `min(dim, n − 1)`, hence linearly dependent. Needs `n ≥ 3` and `dim ≥ 2`.
fn dependent_set<R: Rng>(rng: &mut R, n: usize, dim: usize) -> Result<Vec<Ket>> {
    let r = dim.min(n.saturating_sub(1));
    if r < 2 {
        return Err(Error::Infeasible(format!(
            "a non-collinear dependent set of {n} kets needs n >= 3 and dimension >= 2 (got {dim})"
        )));
    }
    let overlap_cap = 1.0 - 1e3 * ToleranceConfig::default().collinear;
    let basis = random_unitary(rng, dim).columns(0, r).into_owned();
    for _ in 0..MAX_DRAWS {
        let set: Vec<Ket> = (0..n)
            .map(|_| Ket::new(&basis * random_complex_vector(rng, r)))
            .collect::<Result<_>>()?;
        if max_overlap(&set) <= overlap_cap {
            return Ok(set);
        }
    }
    Err(Error::Infeasible(format!(
        "no non-collinear dependent set of {n} kets in dimension {dim}"
    )))
}

/// Random product decomposition with `n` terms on `C^d1 ⊗ C^d2`; weights
/// are positive and sum to one.
///
/// `BothIndependent` needs `n ≤ min(d1, d2)`. `AIndependentOnly` needs
/// `n ≤ d1`, `n ≥ 3` and `d2 ≥ 2` (the b-set is made dependent even when
/// `n ≤ d2`); `BIndependentOnly` mirrors it.
pub fn generate_instance(
    n: usize,
    d1: usize,
    d2: usize,
    seed: u64,
    profile: Profile,
) -> Result<ProductDecomposition> {
    if n == 0 {
        return Err(Error::Infeasible("n must be at least 1".into()));
    }
    let dims = FactoredDims::bipartite(d1, d2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let infeasible =
        |why: &str| Error::Infeasible(format!("n={n}, dims=({d1},{d2}), {profile}: {why}"));
    let (a, b) = match profile {
        Profile::BothIndependent => {
            if n > d1.min(d2) {
                return Err(infeasible("n exceeds min(d1, d2)"));
            }
            (
                independent_set(&mut rng, n, d1)?,
                independent_set(&mut rng, n, d2)?,
            )
        }
        Profile::AIndependentOnly => {
            if n > d1 {
                return Err(infeasible("n exceeds d1"));
            }
            (
                independent_set(&mut rng, n, d1)?,
                dependent_set(&mut rng, n, d2)?,
            )
        }
        Profile::BIndependentOnly => {
            if n > d2 {
                return Err(infeasible("n exceeds d2"));
            }
            let b = independent_set(&mut rng, n, d2)?;
            (dependent_set(&mut rng, n, d1)?, b)
        }
    };
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.25..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let terms = raw
        .into_iter()
        .zip(a.into_iter().zip(b))
        .map(|(w, (a, b))| ProductTerm {
            weight: w / total,
            a,
            b,
        })
        .collect();
    ProductDecomposition::new(dims, terms, &ToleranceConfig::default())
}

/// Random tridecomposition with `n` terms. `dependent_slot` names the one
/// slot (0, 1, 2) whose set is made linearly dependent; `None` keeps all
/// three independent. Coefficients have magnitude in `[0.5, 1.5)` and
/// uniform phase.
pub fn generate_tri_instance(
    n: usize,
    dims: [usize; 3],
    seed: u64,
    dependent_slot: Option<usize>,
) -> Result<TriDecomposition> {
    if n == 0 {
        return Err(Error::Infeasible("n must be at least 1".into()));
    }
    if dependent_slot.is_some_and(|s| s > 2) {
        return Err(Error::Infeasible("dependent slot must be 0, 1 or 2".into()));
    }
    let fd = FactoredDims::new(dims.to_vec())?;
    for (slot, &d) in dims.iter().enumerate() {
        if Some(slot) != dependent_slot && n > d {
            return Err(Error::Infeasible(format!(
                "n={n} exceeds dimension {d} of independent slot {slot}"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sets = Vec::with_capacity(3);
    for (slot, &d) in dims.iter().enumerate() {
        sets.push(if Some(slot) == dependent_slot {
            dependent_set(&mut rng, n, d)?
        } else {
            independent_set(&mut rng, n, d)?
        });
    }
    let terms = (0..n)
        .map(|j| TriTerm {
            coeff: random_phase(&mut rng) * rng.random_range(0.5..1.5),
            a: sets[0][j].clone(),
            b: sets[1][j].clone(),
            c: sets[2][j].clone(),
        })
        .collect();
    TriDecomposition::new(fd, terms, &ToleranceConfig::default())
}

fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Same operator written differently: terms permuted and every ket given a
/// random phase. Returns the twin and `π` with `twin[j] ∼ d[π[j]]`.
pub fn twin_bi(d: &ProductDecomposition, seed: u64) -> Result<(ProductDecomposition, Vec<usize>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pi = random_permutation(&mut rng, d.len());
    let terms = pi
        .iter()
        .map(|&j| {
            let t = &d.terms()[j];
            ProductTerm {
                weight: t.weight,
                a: t.a.with_phase(random_phase(&mut rng)),
                b: t.b.with_phase(random_phase(&mut rng)),
            }
        })
        .collect();
    Ok((
        ProductDecomposition::new(d.dims().clone(), terms, &ToleranceConfig::default())?,
        pi,
    ))
}

/// Same vector written differently: terms permuted, each ket multiplied by a
/// phase and the coefficient divided by their product.
pub fn twin_tri(t: &TriDecomposition, seed: u64) -> Result<(TriDecomposition, Vec<usize>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pi = random_permutation(&mut rng, t.len());
    let terms = pi
        .iter()
        .map(|&j| {
            let src = &t.terms()[j];
            let phases: [C64; 3] = [
                random_phase(&mut rng),
                random_phase(&mut rng),
                random_phase(&mut rng),
            ];
            TriTerm {
                coeff: src.coeff / (phases[0] * phases[1] * phases[2]),
                a: src.a.with_phase(phases[0]),
                b: src.b.with_phase(phases[1]),
                c: src.c.with_phase(phases[2]),
            }
        })
        .collect();
    Ok((
        TriDecomposition::new(t.dims().clone(), terms, &ToleranceConfig::default())?,
        pi,
    ))
}
