use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::kernel::HopSampler;
use super::zrp::ZrpState;
use crate::error::{Error, Result};

/// Occupancy of the exclusion ring. Particles move towards increasing index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingState {
    occ: Vec<bool>,
    m: usize,
    pub time: u64,
    pub y_total: u64,
    #[serde(skip)]
    moves: Vec<(usize, usize)>,
}

impl RingState {
    pub fn new(occ: Vec<bool>) -> Result<Self> {
        if occ.is_empty() {
            return Err(Error::InvalidParameter("ring needs at least one site".into()));
        }
        let m = occ.iter().filter(|&&b| b).count();
        Ok(Self { occ, m, time: 0, y_total: 0, moves: Vec::new() })
    }

    /// Sites are 0-based.
    pub fn from_positions(l: usize, positions: &[usize]) -> Result<Self> {
        let mut occ = vec![false; l];
        for &i in positions {
            if i >= l || occ[i] {
                return Err(Error::InvalidParameter(format!("bad or repeated position {i} on a ring of {l}")));
            }
            occ[i] = true;
        }
        Self::new(occ)
    }

    /// Uniformly random placement of `m` particles.
    pub fn random<R: Rng + ?Sized>(l: usize, m: usize, rng: &mut R) -> Result<Self> {
        if m > l {
            return Err(Error::InvalidParameter(format!("{m} particles do not fit on {l} sites")));
        }
        let mut occ = vec![false; l];
        for i in sample(rng, l, m) {
            occ[i] = true;
        }
        Self::new(occ)
    }

    pub fn len(&self) -> usize {
        self.occ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occ.is_empty()
    }

    pub fn particles(&self) -> usize {
        self.m
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occ
    }

    fn first_hole(&self) -> Option<usize> {
        self.occ.iter().position(|&b| !b)
    }

    /// Calls `f(head, size)` for every cluster, scanning forward from the
    /// first hole so wrap-around clusters come out whole.
    fn for_each_cluster(&self, mut f: impl FnMut(usize, usize)) -> Result<()> {
        let l = self.occ.len();
        let h0 = self.first_hole().ok_or_else(|| Error::DegenerateConfiguration("fully occupied ring has no hole".into()))?;
        let mut run = 0;
        for step in 1..=l {
            let i = (h0 + step) % l;
            if self.occ[i] {
                run += 1;
            } else if run > 0 {
                f((i + l - 1) % l, run);
                run = 0;
            }
        }
        Ok(())
    }

    /// Zero-range image: one site per hole holding the cluster directly behind
    /// it. Site 0 is the first hole after the lowest-index hole.
    pub fn to_zrp(&self) -> Result<ZrpState> {
        let l = self.occ.len();
        let h0 = self.first_hole().ok_or_else(|| Error::DegenerateConfiguration("fully occupied ring has no hole".into()))?;
        let mut sites = Vec::with_capacity(l - self.m);
        let mut run = 0u32;
        for step in 1..=l {
            let i = (h0 + step) % l;
            if self.occ[i] {
                run += 1;
            } else {
                sites.push(run);
                run = 0;
            }
        }
        let mut z = ZrpState::new(sites)?;
        z.time = self.time;
        z.y_total = self.y_total;
        Ok(z)
    }

    /// Height profile `h_0 = 0`, `h_{i+1} - h_i = 1 - 2τ_i`, with the mean
    /// tilt removed so the profile closes on itself.
    pub fn height_bridge(&self) -> Vec<f64> {
        let l = self.occ.len() as f64;
        let slope = (l - 2.0 * self.m as f64) / l;
        let mut h = 0.0;
        let mut out = Vec::with_capacity(self.occ.len());
        for (i, &t) in self.occ.iter().enumerate() {
            out.push(h - slope * i as f64);
            h += if t { -1.0 } else { 1.0 };
        }
        out
    }
}

/// Maximal runs of occupied sites, wrap-aware, in scan order from the first
/// hole.
pub fn cluster_decomposition(state: &RingState) -> Result<Vec<usize>> {
    let mut sizes = Vec::new();
    state.for_each_cluster(|_, k| sizes.push(k))?;
    Ok(sizes)
}

/// One clusterwise backward-sequential update. Every cluster sees the
/// pre-step configuration; its front `m ~ φ(·|k)` particles advance by one.
pub fn step_gtasep<R: Rng + ?Sized>(state: &mut RingState, kernel: &HopSampler, rng: &mut R) -> Result<u64> {
    if state.m == 0 || state.m == state.occ.len() {
        return Err(Error::DegenerateConfiguration(format!(
            "{} particles on {} sites: need at least one particle and one hole",
            state.m,
            state.occ.len()
        )));
    }
    let mut moves = std::mem::take(&mut state.moves);
    moves.clear();
    state.for_each_cluster(|head, k| {
        let m = kernel.sample(k, rng);
        if m > 0 {
            moves.push((head, m));
        }
    })?;
    let l = state.occ.len();
    let mut jumps = 0u64;
    for &(head, m) in &moves {
        state.occ[(head + 1) % l] = true;
        state.occ[(head + l + 1 - m) % l] = false;
        jumps += m as u64;
    }
    state.moves = moves;
    state.time += 1;
    state.y_total += jumps;
    debug_assert_eq!(state.occ.iter().filter(|&&b| b).count(), state.m);
    Ok(jumps)
}
