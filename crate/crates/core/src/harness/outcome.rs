use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::hexfmt;

/// A tampering outcome: `same`, ⊥, or a decoded message.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Same,
    Bot,
    Message(u64),
}

impl Outcome {
    pub fn from_decode(decoded: Option<u64>) -> Self {
        decoded.map_or(Outcome::Bot, Outcome::Message)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Same => f.write_str("same"),
            Outcome::Bot => f.write_str("bot"),
            Outcome::Message(m) => write!(f, "{m:x}"),
        }
    }
}

impl FromStr for Outcome {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "same" => Ok(Outcome::Same),
            "bot" => Ok(Outcome::Bot),
            other => hexfmt::parse(other).map(Outcome::Message),
        }
    }
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Outcome {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `copy(x, y)`: `y` when `x` is `same`, otherwise `x`.
pub fn copy_op(x: Outcome, y: u64) -> Outcome {
    match x {
        Outcome::Same => Outcome::Message(y),
        other => other,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    Exact,
    /// `radius` bounds the statistical distance to the true distribution
    /// with probability 0.99.
    Sampled {
        samples: u64,
        radius: f64,
    },
}

impl Provenance {
    pub fn radius(&self) -> f64 {
        match self {
            Provenance::Exact => 0.0,
            Provenance::Sampled { radius, .. } => *radius,
        }
    }

    pub fn samples(&self) -> u64 {
        match self {
            Provenance::Exact => 0,
            Provenance::Sampled { samples, .. } => *samples,
        }
    }
}

/// A finite distribution over outcomes. JSON form is the bare
/// `{outcome: probability}` map.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDist {
    mass: BTreeMap<Outcome, f64>,
    provenance: Provenance,
}

impl OutcomeDist {
    pub fn point(outcome: Outcome) -> Self {
        OutcomeDist { mass: BTreeMap::from([(outcome, 1.0)]), provenance: Provenance::Exact }
    }

    /// Normalizes nonnegative weights; zero entries are dropped.
    pub fn from_weights(weights: impl IntoIterator<Item = (Outcome, f64)>, provenance: Provenance) -> Self {
        let mut mass = BTreeMap::new();
        for (o, w) in weights {
            if w > 0.0 {
                *mass.entry(o).or_insert(0.0) += w;
            }
        }
        let total: f64 = mass.values().sum();
        if total > 0.0 {
            mass.values_mut().for_each(|v| *v /= total);
        }
        OutcomeDist { mass, provenance }
    }

    pub(crate) fn from_counts(counts: BTreeMap<Outcome, u64>, provenance: Provenance) -> Self {
        let total: u64 = counts.values().sum();
        let mass = counts.into_iter().filter(|(_, c)| *c > 0).map(|(o, c)| (o, c as f64 / total as f64)).collect();
        OutcomeDist { mass, provenance }
    }

    pub fn mass(&self, outcome: Outcome) -> f64 {
        self.mass.get(&outcome).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Outcome, f64)> + '_ {
        self.mass.iter().map(|(o, p)| (*o, *p))
    }

    pub fn support_len(&self) -> usize {
        self.mass.len()
    }

    pub fn total(&self) -> f64 {
        self.mass.values().sum()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn is_exact(&self) -> bool {
        self.provenance == Provenance::Exact
    }

    /// The law of `copy(X, s)` for `X` drawn from `self`.
    pub fn copy_pushforward(&self, s: u64) -> OutcomeDist {
        let mut mass = BTreeMap::new();
        for (o, p) in self.iter() {
            *mass.entry(copy_op(o, s)).or_insert(0.0) += p;
        }
        OutcomeDist { mass, provenance: self.provenance }
    }

    /// Mixture `sum_i w_i D_i` with weights summing to 1.
    pub fn mixture<'a>(parts: impl IntoIterator<Item = (f64, &'a OutcomeDist)>) -> OutcomeDist {
        let mut mass = BTreeMap::new();
        let mut provenance = Provenance::Exact;
        for (w, d) in parts {
            for (o, p) in d.iter() {
                *mass.entry(o).or_insert(0.0) += w * p;
            }
            provenance = combine(provenance, d.provenance, |a, b| a.max(b));
        }
        OutcomeDist { mass, provenance }
    }
}

fn combine(a: Provenance, b: Provenance, radius: impl Fn(f64, f64) -> f64) -> Provenance {
    match (a, b) {
        (Provenance::Exact, Provenance::Exact) => Provenance::Exact,
        _ => Provenance::Sampled { samples: a.samples().max(b.samples()), radius: radius(a.radius(), b.radius()) },
    }
}

/// Half the L1 distance over the union of supports.
pub fn stat_dist(a: &OutcomeDist, b: &OutcomeDist) -> f64 {
    let mut keys: Vec<Outcome> = a.mass.keys().chain(b.mass.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let l1: f64 = keys.iter().map(|&o| (a.mass(o) - b.mass(o)).abs()).sum();
    (l1 / 2.0).min(1.0)
}

/// Confidence radius of [`stat_dist`]: the radii of sampled inputs add.
pub fn dist_radius(a: &OutcomeDist, b: &OutcomeDist) -> f64 {
    a.provenance.radius() + b.provenance.radius()
}

impl Serialize for OutcomeDist {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.mass.iter())
    }
}

impl<'de> Deserialize<'de> for OutcomeDist {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let mass = BTreeMap::<Outcome, f64>::deserialize(d)?;
        if mass.values().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(serde::de::Error::custom("probability outside [0, 1]"));
        }
        Ok(OutcomeDist { mass, provenance: Provenance::Exact })
    }
}
