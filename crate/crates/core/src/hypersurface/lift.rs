//! Two-sided double cover of hypersurfaces in `RP^{n+1}`: node pairing under the
//! antipodal map `τ(x) = −x` of the sphere cover and parity of node fields.

use super::DiscreteHypersurface;
use crate::ambient::AmbientKind;
use crate::error::{LabError, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

const PAIR_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Neither,
}

#[derive(Clone, Debug)]
pub struct DoubleCoverLift<'a> {
    base: &'a DiscreteHypersurface,
    pairing: Vec<usize>,
    normal_parity: Parity,
}

/// Pairs every node with its antipode; fails unless the node set is invariant.
pub fn lift_to_double_cover(hyp: &DiscreteHypersurface) -> Result<DoubleCoverLift<'_>> {
    match hyp.ambient().kind() {
        AmbientKind::Sphere { .. } | AmbientKind::RealProjective { .. } => {}
        other => {
            return Err(LabError::Incompatible(format!(
                "antipodal lift needs a sphere cover, got {other}"
            )))
        }
    }
    let key = |x: &nalgebra::DVector<f64>| -> Vec<i64> {
        x.iter().map(|v| (v * 1e6).round() as i64).collect()
    };
    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    for (a, p) in hyp.points.iter().enumerate() {
        index.insert(key(&p.position), a);
    }
    let mut pairing = Vec::with_capacity(hyp.node_count());
    for (a, p) in hyp.points.iter().enumerate() {
        let target = -&p.position;
        let hit = index
            .get(&key(&target))
            .copied()
            .filter(|&b| (&hyp.points[b].position - &target).norm() < PAIR_TOL)
            .or_else(|| {
                hyp.points
                    .iter()
                    .position(|q| (&q.position - &target).norm() < PAIR_TOL)
            });
        match hit {
            Some(b) if b != a => pairing.push(b),
            Some(_) => return Err(LabError::NotAntipodal(format!("node {a} is a fixed point"))),
            None => return Err(LabError::NotAntipodal(format!("node {a} has no antipode"))),
        }
    }
    let mut odd: f64 = 0.0;
    let mut even: f64 = 0.0;
    for (a, &b) in pairing.iter().enumerate() {
        odd = odd.max((&hyp.normals[b] + &hyp.normals[a]).norm());
        even = even.max((&hyp.normals[b] - &hyp.normals[a]).norm());
    }
    let normal_parity = if odd < 1e-10 {
        Parity::Odd
    } else if even < 1e-10 {
        Parity::Even
    } else {
        Parity::Neither
    };
    Ok(DoubleCoverLift { base: hyp, pairing, normal_parity })
}

impl<'a> DoubleCoverLift<'a> {
    pub fn base(&self) -> &'a DiscreteHypersurface {
        self.base
    }

    /// Antipodal partner of each node.
    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    /// Parity of the unit normal under `τ`; odd means the quotient is two-sided.
    pub fn normal_parity(&self) -> Parity {
        self.normal_parity
    }

    /// Largest values of `|f(τa) − f(a)|` and `|f(τa) + f(a)|`.
    pub fn parity_residuals(&self, f: &[f64]) -> (f64, f64) {
        let mut even: f64 = 0.0;
        let mut odd: f64 = 0.0;
        for (a, &b) in self.pairing.iter().enumerate() {
            even = even.max((f[b] - f[a]).abs());
            odd = odd.max((f[b] + f[a]).abs());
        }
        (even, odd)
    }

    pub fn classify(&self, f: &[f64]) -> Parity {
        let scale = f.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let (even, odd) = self.parity_residuals(f);
        if even <= 1e-10 * scale {
            Parity::Even
        } else if odd <= 1e-10 * scale {
            Parity::Odd
        } else {
            Parity::Neither
        }
    }

    /// Representatives of the quotient: one node of each antipodal pair.
    pub fn quotient_nodes(&self) -> Vec<usize> {
        (0..self.pairing.len()).filter(|&a| a < self.pairing[a]).collect()
    }

    /// Values of an even field on the quotient representatives.
    pub fn descend_field(&self, f: &[f64]) -> Result<Vec<f64>> {
        match self.classify(f) {
            Parity::Even => Ok(self.quotient_nodes().into_iter().map(|a| f[a]).collect()),
            _ => Err(LabError::NotEven { residual: self.parity_residuals(f).0 }),
        }
    }
}
