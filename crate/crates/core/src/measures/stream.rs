use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Generator handed out by [`RandomStream::rng`].
pub type StreamRng = ChaCha8Rng;

/// Reproducible, splittable source of randomness.
///
/// A stream is a `(seed, path)` pair; [`child`](Self::child) appends to the
/// path. The path is hashed into a ChaCha key, so every stream is an
/// independent counter-based generator and draws never depend on the order in
/// which sibling streams are consumed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomStream {
    seed: u64,
    path: Vec<u64>,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, path: Vec::new() }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    pub fn child(&self, index: u64) -> Self {
        let mut path = self.path.clone();
        path.push(index);
        Self { seed: self.seed, path }
    }

    pub fn key(&self) -> [u8; 32] {
        let mut state = self.seed;
        let mut acc = splitmix64(&mut state);
        for (depth, &p) in self.path.iter().enumerate() {
            let mut s = acc ^ p.rotate_left(17) ^ ((depth as u64 + 1) << 56);
            acc = splitmix64(&mut s) ^ splitmix64(&mut s).rotate_left(29);
        }
        let mut s = acc ^ (self.path.len() as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut s).to_le_bytes());
        }
        key
    }

    pub fn rng(&self) -> StreamRng {
        ChaCha8Rng::from_seed(self.key())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use std::collections::HashSet;

    #[test]
    fn same_path_same_draws() {
        let a: Vec<u64> = (0..8).map({ let mut r = RandomStream::new(7).child(3).rng(); move |_| r.random() }).collect();
        let b: Vec<u64> = (0..8).map({ let mut r = RandomStream::new(7).child(3).rng(); move |_| r.random() }).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_paths_get_distinct_keys() {
        let root = RandomStream::new(42);
        let mut keys = HashSet::new();
        for i in 0..50 {
            assert!(keys.insert(root.child(i).key()));
            for j in 0..50 {
                assert!(keys.insert(root.child(i).child(j).key()));
            }
        }
        assert!(keys.insert(root.key()));
        assert!(keys.insert(RandomStream::new(43).key()));
        // [0] and [0, 0] differ even though the extra element is zero.
        assert_ne!(root.child(0).key(), root.child(0).child(0).key());
    }

    #[test]
    fn sibling_streams_are_uncorrelated() {
        let root = RandomStream::new(9);
        let n = 100_000;
        let mut a = root.child(0).rng();
        let mut b = root.child(1).rng();
        let (xs, ys): (Vec<f64>, Vec<f64>) = (0..n).map(|_| (a.random::<f64>(), b.random::<f64>())).unzip();
        let mx = xs.iter().sum::<f64>() / n as f64;
        let my = ys.iter().sum::<f64>() / n as f64;
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / n as f64;
        let corr = cov / (1.0 / 12.0);
        assert!(corr.abs() < 4.0 / (n as f64).sqrt(), "correlation {corr}");
    }
}
