//! Weighted Laplacian, its pseudo-inverse, DC power flow and effective
//! resistance.

use std::ops::Deref;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{island_sums, LineSet, PowerNetwork};

pub use crate::network::is_balanced;

/// Absolute tolerance applied to per-island injection sums: 1e-9 of the
/// total absolute injection, never below 1e-9 MW.
pub fn balance_tolerance(p: &[f64]) -> f64 {
    1e-9 * p.iter().map(|x| x.abs()).sum::<f64>().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveLine {
    pub id: usize,
    pub from: usize,
    pub to: usize,
    pub susceptance: f64,
}

/// Laplacian and pseudo-inverse of a network with some lines possibly out.
#[derive(Debug, Clone)]
pub struct LaplacianSystem {
    laplacian: DMatrix<f64>,
    pinv: DMatrix<f64>,
    islands: Vec<Vec<usize>>,
    island_of: Vec<usize>,
    lines: Vec<ActiveLine>,
    line_slots: usize,
}

impl LaplacianSystem {
    pub fn build(net: &PowerNetwork) -> Result<LaplacianSystem> {
        LaplacianSystem::build_without(net, &LineSet::new())
    }

    /// Laplacian of the network with `removed` lines out of service. Flow
    /// vectors stay indexed by the original line ids.
    pub fn build_without(net: &PowerNetwork, removed: &LineSet) -> Result<LaplacianSystem> {
        let n = net.bus_count();
        if n == 0 {
            return Err(Error::Data("network has no buses".into()));
        }
        let lines: Vec<ActiveLine> = net
            .lines()
            .iter()
            .filter(|l| !removed.contains(&l.id))
            .map(|l| ActiveLine { id: l.id, from: l.from, to: l.to, susceptance: l.susceptance })
            .collect();
        let mut laplacian = DMatrix::zeros(n, n);
        for l in &lines {
            let (i, j, b) = (l.from, l.to, l.susceptance);
            laplacian[(i, i)] += b;
            laplacian[(j, j)] += b;
            laplacian[(i, j)] -= b;
            laplacian[(j, i)] -= b;
        }
        let islands = net.graph_without(removed).components();
        let mut island_of = vec![0; n];
        for (k, island) in islands.iter().enumerate() {
            for &v in island {
                island_of[v] = k;
            }
        }
        let mut pinv = DMatrix::zeros(n, n);
        for (k, island) in islands.iter().enumerate() {
            let block = island_pinv(&laplacian, island).ok_or_else(|| {
                Error::Conditioning(format!("corrected Laplacian of island {k} (buses {:?}) is singular", island))
            })?;
            for (a, &i) in island.iter().enumerate() {
                for (b, &j) in island.iter().enumerate() {
                    pinv[(i, j)] = block[(a, b)];
                }
            }
        }
        Ok(LaplacianSystem { laplacian, pinv, islands, island_of, lines, line_slots: net.line_count() })
    }

    pub fn bus_count(&self) -> usize {
        self.island_of.len()
    }

    pub fn laplacian(&self) -> &DMatrix<f64> {
        &self.laplacian
    }

    pub fn pseudo_inverse(&self) -> &DMatrix<f64> {
        &self.pinv
    }

    pub fn pinv(&self, i: usize, j: usize) -> f64 {
        self.pinv[(i, j)]
    }

    pub fn islands(&self) -> &[Vec<usize>] {
        &self.islands
    }

    pub fn island_of(&self, v: usize) -> usize {
        self.island_of[v]
    }

    pub fn is_connected(&self) -> bool {
        self.islands.len() == 1
    }

    /// Lines in service, in id order.
    pub fn active_lines(&self) -> &[ActiveLine] {
        &self.lines
    }

    /// Length of flow vectors produced by this system.
    pub fn line_slots(&self) -> usize {
        self.line_slots
    }

    /// θ = L†p, after checking p is balanced on every island.
    pub fn angles(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.bus_count() {
            return Err(Error::InvalidArgument(format!(
                "injection vector has {} entries for {} buses",
                p.len(),
                self.bus_count()
            )));
        }
        let tol = balance_tolerance(p);
        let residuals: Vec<(usize, f64)> = island_sums(p, &self.islands)
            .into_iter()
            .enumerate()
            .filter(|(_, s)| s.abs() > tol)
            .collect();
        if !residuals.is_empty() {
            return Err(Error::Unbalanced { residuals });
        }
        let theta = &self.pinv * nalgebra::DVector::from_column_slice(p);
        Ok(theta.as_slice().to_vec())
    }

    /// f = B Cᵀ L† p. Out-of-service lines carry zero flow.
    pub fn dc_flow(&self, p: &[f64]) -> Result<FlowVector> {
        let theta = self.angles(p)?;
        let mut f = vec![0.0; self.line_slots];
        for l in &self.lines {
            f[l.id] = l.susceptance * (theta[l.from] - theta[l.to]);
        }
        Ok(FlowVector(f))
    }

    /// R_ij, or `None` when i and j sit on different islands.
    pub fn effective_resistance(&self, i: usize, j: usize) -> Option<f64> {
        if self.island_of[i] != self.island_of[j] {
            return None;
        }
        if i == j {
            return Some(0.0);
        }
        Some(self.pinv[(i, i)] + self.pinv[(j, j)] - 2.0 * self.pinv[(i, j)])
    }

    /// R_tot = n · tr(L†); defined for connected networks only.
    pub fn total_effective_resistance(&self) -> Result<f64> {
        if !self.is_connected() {
            return Err(Error::Disconnected(format!(
                "total effective resistance needs one island, found {}",
                self.islands.len()
            )));
        }
        Ok(self.bus_count() as f64 * self.pinv.trace())
    }
}

/// (L_I + J/|I|)⁻¹ − J/|I| for one island.
fn island_pinv(laplacian: &DMatrix<f64>, island: &[usize]) -> Option<DMatrix<f64>> {
    let s = island.len();
    if s == 1 {
        return Some(DMatrix::zeros(1, 1));
    }
    let c = 1.0 / s as f64;
    let corrected = DMatrix::from_fn(s, s, |a, b| laplacian[(island[a], island[b])] + c);
    let inverse = match corrected.clone().cholesky() {
        Some(chol) => chol.inverse(),
        None => corrected.lu().try_inverse()?,
    };
    if !inverse.iter().all(|x| x.is_finite()) {
        return None;
    }
    let mut out = inverse.add_scalar(-c);
    out = (&out + out.transpose()) * 0.5;
    Some(out)
}

/// Per-line flows in MW, indexed by line id, signed by line orientation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FlowVector(pub Vec<f64>);

impl Deref for FlowVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl FlowVector {
    /// max over buses of |p_i − (C f)_i|.
    pub fn conservation_residual(&self, net: &PowerNetwork, p: &[f64]) -> f64 {
        let mut net_out = vec![0.0; net.bus_count()];
        for l in net.lines() {
            net_out[l.from] += self.0[l.id];
            net_out[l.to] -= self.0[l.id];
        }
        net_out.iter().zip(p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}
