//! Monte Carlo dynamics of the exclusion ring and its zero-range image, an
//! exact sampler of the grand-canonical stationary measure, and estimators.

mod ensemble;
mod kernel;
mod ring;
pub mod stats;
mod stationary;
mod zrp;

pub use ensemble::{run_ensemble, EnsembleConfig, CHI_BINS, Estimate, ObservableReport, ReplicaTrace};
pub use kernel::HopSampler;
pub use ring::{cluster_decomposition, step_gtasep, RingState};
pub use stationary::{sample_stationary, StationarySampler};
pub use zrp::{step_zrp, ZrpState};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream `replica` of the master `seed`: every replica gets its own ChaCha
/// stream under the same key, so streams never overlap.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}
