use rand::Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::{Error, Result};
use crate::ModelParams;

/// Draws `m ~ φ(·|n)`: no move with probability `1 - p`, otherwise the head
/// plus a geometric number of followers capped at the cluster size.
#[derive(Debug, Clone)]
pub struct HopSampler {
    p: f64,
    followers: Followers,
}

#[derive(Debug, Clone)]
enum Followers {
    None,
    All,
    Geometric(Geometric),
}

impl HopSampler {
    pub fn new(params: &ModelParams) -> Result<Self> {
        let mu = *params.mu();
        let followers = if mu == 0.0 {
            Followers::None
        } else if mu == 1.0 {
            Followers::All
        } else {
            // Counts successes (prob mu) before the first failure.
            Followers::Geometric(Geometric::new(1.0 - mu).map_err(|e| Error::InvalidParameter(e.to_string()))?)
        };
        Ok(Self { p: *params.p(), followers })
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> usize {
        if n == 0 || rng.random::<f64>() >= self.p {
            return 0;
        }
        let extra = match &self.followers {
            Followers::None => 0,
            Followers::All => n - 1,
            Followers::Geometric(g) => g.sample(rng).min((n - 1) as u64) as usize,
        };
        1 + extra
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::replica_rng;

    #[test]
    fn empirical_kernel_matches_phi() {
        let params = ModelParams::new(0.4, 0.7).unwrap();
        let s = HopSampler::new(&params).unwrap();
        let mut rng = replica_rng(11, 0);
        let n = 4;
        let trials = 400_000;
        let mut counts = vec![0usize; n + 1];
        for _ in 0..trials {
            counts[s.sample(n, &mut rng)] += 1;
        }
        for (m, &c) in counts.iter().enumerate() {
            let phi = params.hop_kernel(m, n).unwrap();
            let sd = (phi * (1.0 - phi) / trials as f64).sqrt();
            assert!((c as f64 / trials as f64 - phi).abs() < 5.0 * sd, "m={m}");
        }
    }

    #[test]
    fn extreme_follower_probabilities() {
        let mut rng = replica_rng(3, 0);
        let all = HopSampler::new(&ModelParams::new(0.999_999, 1.0).unwrap()).unwrap();
        let none = HopSampler::new(&ModelParams::new(0.999_999, 0.0).unwrap()).unwrap();
        let (mut a, mut b) = (0, 0);
        for _ in 0..1000 {
            a += all.sample(5, &mut rng);
            b += none.sample(5, &mut rng);
        }
        assert!(a > 4900 && b > 980 && b <= 1000);
        assert_eq!(all.sample(0, &mut rng), 0);
    }
}
