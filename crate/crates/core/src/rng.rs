use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Independent stream for one replication: the master seed fixes the key and
/// the replication index selects the ChaCha stream, so a replication draws
/// the same numbers whichever thread runs it.
pub fn replication_rng(master_seed: u64, replication: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replication);
    rng
}
