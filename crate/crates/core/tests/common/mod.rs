#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use statcurv::metric::{load_spec, Chart};
use statcurv::stationary::StationaryStructure;

pub const S3: &[u8] = include_bytes!("../../../../specs/s3.spec");
pub const FLAT_TORUS: &[u8] = include_bytes!("../../../../specs/flat_torus.spec");
pub const S3_T2: &[u8] = include_bytes!("../../../../specs/s3_t2.spec");
pub const S5: &[u8] = include_bytes!("../../../../specs/s5.spec");

pub fn structure(bytes: &[u8]) -> StationaryStructure {
    StationaryStructure::from_spec(load_spec(bytes).unwrap()).unwrap()
}

pub fn s3() -> StationaryStructure {
    structure(S3)
}

pub fn flat_torus() -> StationaryStructure {
    structure(FLAT_TORUS)
}

pub fn s3_t2() -> StationaryStructure {
    structure(S3_T2)
}

pub fn random_points(chart: &Chart, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            chart
                .interior_box()
                .iter()
                .map(|&(a, b)| rng.gen_range(a..=b))
                .collect()
        })
        .collect()
}

pub fn s5() -> StationaryStructure {
    structure(S5)
}
