use rand::Rng;

use super::ring::RingState;
use crate::error::{Error, Result};
use crate::ModelParams;

type Mat2 = [[f64; 2]; 2];

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Exact sampler of the grand-canonical stationary measure
/// `P(τ) ∝ Π T_{τ_i τ_{i+1}}` on a ring of `L` sites, with
/// `T_00 = 1`, `T_01 = T_10 = sqrt(z(1-ν))`, `T_11 = z`.
#[derive(Debug, Clone)]
pub struct StationarySampler {
    l: usize,
    t: Mat2,
    /// `(T/λ₁)^k` for `k = 0..=L`.
    powers: Vec<Mat2>,
}

impl StationarySampler {
    pub fn new(l: usize, params: &ModelParams, z: f64) -> Result<Self> {
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::Domain(format!("fugacity must be positive, got {z}")));
        }
        let nu = *params.nu();
        if nu >= 1.0 {
            return Err(Error::Domain("stationary sampler needs nu < 1".into()));
        }
        if l == 0 {
            return Err(Error::InvalidParameter("ring needs at least one site".into()));
        }
        let s = (z * (1.0 - nu)).sqrt();
        let lam1 = 0.5 * (1.0 + z + ((1.0 + z).powi(2) - 4.0 * nu * z).sqrt());
        let t = [[1.0, s], [s, z]];
        let tn = [[1.0 / lam1, s / lam1], [s / lam1, z / lam1]];
        let mut powers = Vec::with_capacity(l + 1);
        powers.push([[1.0, 0.0], [0.0, 1.0]]);
        for k in 0..l {
            let next = mul(&powers[k], &tn);
            powers.push(next);
        }
        Ok(Self { l, t, powers })
    }

    /// Conditions on `τ_1` drawn from its exact marginal, then sweeps forward
    /// with `P(τ_i = b | τ_{i-1} = a) ∝ T_ab (T^{L-i+1})_{b τ_1}`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> RingState {
        let l = self.l;
        let full = &self.powers[l];
        let first = (rng.random::<f64>() * (full[0][0] + full[1][1]) >= full[0][0]) as usize;
        let mut occ = Vec::with_capacity(l);
        occ.push(first == 1);
        let mut prev = first;
        for i in 1..l {
            let rest = &self.powers[l - i];
            let w0 = self.t[prev][0] * rest[0][first];
            let w1 = self.t[prev][1] * rest[1][first];
            let b = (rng.random::<f64>() * (w0 + w1) >= w0) as usize;
            occ.push(b == 1);
            prev = b;
        }
        RingState::new(occ).expect("non-empty ring")
    }
}

pub fn sample_stationary<R: Rng + ?Sized>(l: usize, params: &ModelParams, z: f64, rng: &mut R) -> Result<RingState> {
    Ok(StationarySampler::new(l, params, z)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::replica_rng;

    #[test]
    fn rejects_bad_fugacity() {
        let p = ModelParams::new(0.5, 0.5).unwrap();
        let mut rng = replica_rng(0, 0);
        assert!(matches!(sample_stationary(10, &p, 0.0, &mut rng), Err(Error::Domain(_))));
        assert!(matches!(sample_stationary(10, &p, -1.0, &mut rng), Err(Error::Domain(_))));
    }

    #[test]
    fn bsu_sites_are_bernoulli() {
        // nu = 0: T is rank one, sites independent with density z/(1+z).
        let p = ModelParams::new(0.5, 0.5).unwrap();
        let z = 0.6;
        let s = StationarySampler::new(40, &p, z).unwrap();
        let mut rng = replica_rng(8, 0);
        let reps = 20_000;
        let mut ones = 0usize;
        let mut pair = 0usize;
        for _ in 0..reps {
            let st = s.sample(&mut rng);
            let o = st.occupancy();
            ones += o.iter().filter(|&&b| b).count();
            pair += (0..40).filter(|&i| o[i] && o[(i + 3) % 40]).count();
        }
        let c = z / (1.0 + z);
        let n = (reps * 40) as f64;
        let dens = ones as f64 / n;
        assert!((dens - c).abs() < 4.0 * (c * (1.0 - c) / n).sqrt() * 3.0);
        assert!((pair as f64 / n - c * c).abs() < 0.005);
    }

    #[test]
    fn small_ring_matches_enumeration() {
        let p = ModelParams::new(0.4, 0.7).unwrap();
        let (l, z) = (5usize, 1.3);
        let nu = *p.nu();
        let weight = |cfg: usize| -> f64 {
            (0..l)
                .map(|i| {
                    let a = (cfg >> i) & 1;
                    let b = (cfg >> ((i + 1) % l)) & 1;
                    match (a, b) {
                        (0, 0) => 1.0,
                        (1, 1) => z,
                        _ => (z * (1.0 - nu)).sqrt(),
                    }
                })
                .product()
        };
        let total: f64 = (0..1 << l).map(weight).sum();
        let s = StationarySampler::new(l, &p, z).unwrap();
        let mut rng = replica_rng(13, 0);
        let reps = 200_000;
        let mut counts = vec![0usize; 1 << l];
        for _ in 0..reps {
            let st = s.sample(&mut rng);
            let cfg: usize = st.occupancy().iter().enumerate().map(|(i, &b)| (b as usize) << i).sum();
            counts[cfg] += 1;
        }
        for cfg in 0..1 << l {
            let pr = weight(cfg) / total;
            let sd = (pr * (1.0 - pr) / reps as f64).sqrt();
            assert!((counts[cfg] as f64 / reps as f64 - pr).abs() < 5.0 * sd + 1e-12, "cfg {cfg}");
        }
    }
}
