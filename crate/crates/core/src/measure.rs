//! Probability distributions over the worlds of a [`WorldSpace`] and the
//! sentence probabilities they induce.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::syntax::Formula;
use crate::worlds::WorldSpace;

/// Nonnegative rational weights over worlds summing to exactly one. Only
/// worlds with positive weight are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    space: WorldSpace,
    weights: BTreeMap<usize, Rational>,
}

impl Distribution {
    /// Builds from `(world index, weight)` pairs. Unlisted worlds get weight
    /// zero; a world may be listed at most once.
    pub fn from_weights<I>(space: &WorldSpace, weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut map = BTreeMap::new();
        let mut seen = BTreeMap::new();
        let mut total = Rational::zero();
        for (k, w) in weights {
            if k >= space.world_count() {
                return Err(Error::InvalidDistribution(format!(
                    "world {k} out of range (space has {} worlds)",
                    space.world_count()
                )));
            }
            if seen.insert(k, ()).is_some() {
                return Err(Error::InvalidDistribution(format!(
                    "world {k} listed twice"
                )));
            }
            if w.is_negative() {
                return Err(Error::InvalidDistribution(format!(
                    "negative weight {} on world {k}",
                    rational::format(&w)
                )));
            }
            total += &w;
            if !w.is_zero() {
                map.insert(k, w);
            }
        }
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {}, not 1",
                rational::format(&total)
            )));
        }
        Ok(Self {
            space: space.clone(),
            weights: map,
        })
    }

    /// One weight per atom sentence (complete conjunction of literals). Every
    /// world must be covered exactly once.
    pub fn from_atom_probs(
        space: &WorldSpace,
        assignments: &[(Formula, Rational)],
    ) -> Result<Self> {
        let mut pairs = Vec::with_capacity(assignments.len());
        for (atom, w) in assignments {
            let tv = space.truth_vector(atom)?;
            let mut hits = tv.iter_true();
            match (hits.next(), hits.next()) {
                (Some(k), None) => pairs.push((k, w.clone())),
                _ => {
                    return Err(Error::InvalidDistribution(format!(
                        "`{atom}` is not an atom sentence of the world space"
                    )))
                }
            }
        }
        if pairs.len() != space.world_count() {
            let mut covered: Vec<usize> = pairs.iter().map(|(k, _)| *k).collect();
            covered.sort_unstable();
            covered.dedup();
            if covered.len() == pairs.len() {
                let missing = (0..space.world_count()).find(|k| covered.binary_search(k).is_err());
                if let Some(k) = missing.and_then(|k| space.world(k)) {
                    return Err(Error::InvalidDistribution(format!(
                        "missing atom `{}`",
                        space.atom_sentence(&k)
                    )));
                }
            }
        }
        Self::from_weights(space, pairs)
    }

    pub fn uniform(space: &WorldSpace) -> Self {
        let n = space.world_count();
        let w = Rational::new(1.into(), n.into());
        Self {
            space: space.clone(),
            weights: (0..n).map(|k| (k, w.clone())).collect(),
        }
    }

    /// All mass on a single world.
    pub fn point_mass(space: &WorldSpace, world: usize) -> Result<Self> {
        Self::from_weights(space, [(world, Rational::one())])
    }

    pub fn space(&self) -> &WorldSpace {
        &self.space
    }

    pub fn weight(&self, world: usize) -> Rational {
        self.weights
            .get(&world)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Worlds with positive weight, ascending.
    pub fn support(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.weights.iter().map(|(k, w)| (*k, w))
    }

    /// Sum of the weights of the worlds satisfying a ground, quantifier-free
    /// formula.
    pub fn probability(&self, f: &Formula) -> Result<Rational> {
        let mut p = Rational::zero();
        for (&k, w) in &self.weights {
            let world = self.space.world(k).expect("support index in range");
            if self.space.satisfies(&world, f)? {
                p += w;
            }
        }
        Ok(p)
    }

    /// `p[a | b]`, or `None` when `p[b] = 0`.
    pub fn conditional(&self, a: &Formula, b: &Formula) -> Result<Option<Rational>> {
        let pb = self.probability(b)?;
        if pb.is_zero() {
            return Ok(None);
        }
        let pab = self.probability(&Formula::and(a.clone(), b.clone()))?;
        Ok(Some(pab / pb))
    }

    pub fn check_additivity(&self, a: &Formula, b: &Formula) -> Result<AdditivityReport> {
        let both = self
            .space
            .truth_vector(&Formula::and(a.clone(), b.clone()))?;
        let p_a = self.probability(a)?;
        let p_b = self.probability(b)?;
        let p_union = self.probability(&Formula::or(a.clone(), b.clone()))?;
        let disjoint = both.is_all_false();
        let holds = disjoint.then(|| p_union == &p_a + &p_b);
        Ok(AdditivityReport {
            disjoint,
            p_a,
            p_b,
            p_union,
            holds,
        })
    }

    /// `w <index> <p/q>` per positive-weight world.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (k, w) in &self.weights {
            let _ = writeln!(out, "w {k} {}", rational::format(w));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditivityReport {
    /// `a & b` is false in every world.
    pub disjoint: bool,
    pub p_a: Rational,
    pub p_b: Rational,
    pub p_union: Rational,
    /// `Some(p[a|b] == p[a] + p[b])` for disjoint pairs.
    pub holds: Option<bool>,
}
