use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Splittable generator key. Each `(seed, stream)` pair names an independent
/// ChaCha8 stream, so children can be derived without shared mutable state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rng {
    seed: u64,
    stream: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { seed, stream: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Child stream `i`. Distinct `i` give distinct streams; splitting is
    /// hierarchical, so `split(i).split(j)` differs from `split(j).split(i)`.
    pub fn split(&self, i: u64) -> Rng {
        let stream = splitmix64(self.stream.rotate_left(23) ^ splitmix64(i.wrapping_add(1)));
        Rng { seed: self.seed, stream }
    }

    /// A 64-bit seed drawn from this stream, for APIs keyed by plain seeds.
    pub fn derive_seed(&self) -> u64 {
        rand::RngCore::next_u64(&mut self.generator())
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn generator(&self) -> ChaCha8Rng {
        let mut g = ChaCha8Rng::seed_from_u64(self.seed);
        g.set_stream(self.stream);
        g
    }
}

/// Uniform on the open interval (0, 1).
pub(crate) fn open_unit(g: &mut impl rand::RngCore) -> f64 {
    loop {
        let u: f64 = g.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Standard Cauchy draw `tan(π(U − ½))`.
pub fn cauchy(g: &mut impl rand::RngCore) -> f64 {
    (std::f64::consts::PI * (open_unit(g) - 0.5)).tan()
}

/// `count` i.i.d. standard Cauchy variables.
pub fn sample_cauchy(rng: Rng, count: usize) -> Vec<f64> {
    let mut g = rng.generator();
    (0..count).map(|_| cauchy(&mut g)).collect()
}

pub fn sample_gaussian(rng: Rng, count: usize, std_dev: f64) -> Vec<f64> {
    let mut g = rng.generator();
    (0..count).map(|_| std_dev * g.sample::<f64, _>(rand_distr::StandardNormal)).collect()
}
