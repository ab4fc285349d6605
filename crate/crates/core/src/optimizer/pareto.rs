use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    fn oriented(self, v: f64) -> f64 {
        match self {
            Sense::Minimize => v,
            Sense::Maximize => -v,
        }
    }
}

/// `a` dominates `b`: no worse anywhere, strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64], senses: &[Sense]) -> bool {
    let mut strictly = false;
    for ((&x, &y), s) in a.iter().zip(b).zip(senses) {
        let (x, y) = (s.oriented(x), s.oriented(y));
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

fn weakly_dominates(a: &[f64], b: &[f64], senses: &[Sense]) -> bool {
    a.iter()
        .zip(b)
        .zip(senses)
        .all(|((&x, &y), s)| s.oriented(x) <= s.oriented(y))
}

fn check_point(point: &[f64], senses: &[Sense]) -> Result<()> {
    if point.len() != senses.len() {
        return Err(Error::Domain(format!(
            "objective vector has {} entries, expected {}",
            point.len(),
            senses.len()
        )));
    }
    if point.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("objective vector is not finite".into()));
    }
    Ok(())
}

/// Indices of the non-dominated points, ascending. Of several identical
/// points only the first is kept.
pub fn pareto_filter(points: &[Vec<f64>], senses: &[Sense]) -> Result<Vec<usize>> {
    for p in points {
        check_point(p, senses)?;
    }
    let mut archive = ParetoArchive::new(senses.to_vec());
    for (i, p) in points.iter().enumerate() {
        archive.insert(p.clone(), i)?;
    }
    let mut kept: Vec<usize> = archive.members.into_iter().map(|(_, i)| i).collect();
    kept.sort_unstable();
    Ok(kept)
}

/// Mutually non-dominated set of objective vectors with payloads.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParetoArchive<T> {
    senses: Vec<Sense>,
    members: Vec<(Vec<f64>, T)>,
}

impl<T> ParetoArchive<T> {
    pub fn new(senses: Vec<Sense>) -> Self {
        Self {
            senses,
            members: Vec::new(),
        }
    }

    pub fn senses(&self) -> &[Sense] {
        &self.senses
    }

    /// Inserts unless an existing member weakly dominates the point; evicts
    /// members the point dominates. Returns whether it was inserted.
    pub fn insert(&mut self, objectives: Vec<f64>, payload: T) -> Result<bool> {
        check_point(&objectives, &self.senses)?;
        if self
            .members
            .iter()
            .any(|(m, _)| weakly_dominates(m, &objectives, &self.senses))
        {
            return Ok(false);
        }
        let senses = &self.senses;
        self.members.retain(|(m, _)| !dominates(&objectives, m, senses));
        self.members.push((objectives, payload));
        Ok(true)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[(Vec<f64>, T)] {
        &self.members
    }

    pub fn objectives(&self) -> Vec<Vec<f64>> {
        self.members.iter().map(|(o, _)| o.clone()).collect()
    }

    /// Members sorted lexicographically by objective vector.
    pub fn into_sorted(mut self) -> Vec<(Vec<f64>, T)> {
        self.members.sort_by(|a, b| {
            a.0.iter()
                .zip(&b.0)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        self.members
    }
}
