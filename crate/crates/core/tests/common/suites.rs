//! Shared fixtures for the property and acceptance targets.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regmaps::classify::{search_maps, SearchOptions};
use regmaps::families::{self, FamilyParams};
use regmaps::fields;
use regmaps::groups::GroupElement;
use regmaps::maps::AlgebraicMap;

/// Fifty maps drawn from the three families and from projective searches.
pub fn corpus() -> &'static [AlgebraicMap] {
    static CORPUS: OnceLock<Vec<AlgebraicMap>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut maps = Vec::new();
        for j in [3u32, 5, 7, 9, 11] {
            for k in [3u32, 5, 7, 9, 11] {
                if j <= k {
                    maps.push(families::build_m1(j, k).unwrap());
                }
            }
        }
        for u in [3, 9, 15, 21, 27] {
            maps.push(families::build_m3(u).unwrap());
        }
        'outer: for p in [5u64, 7, 11, 13] {
            for n in [4u64, 6, 8, 10, 12] {
                for x in fields::s_set(n, p).unwrap().members {
                    maps.push(families::build_m2(x, n, p).unwrap());
                    if maps.len() >= 38 {
                        break 'outer;
                    }
                }
            }
        }
        for spec in ["psl:f=7", "pgl:f=7", "psl:f=11", "pgl:f=5"] {
            let g = spec.parse::<FamilyParams>().unwrap().build().unwrap();
            maps.extend(search_maps(&g, &SearchOptions::default()).unwrap());
        }
        maps.truncate(50);
        assert_eq!(maps.len(), 50);
        maps
    })
}

/// Order of `[[0,1],[-1,x]]` mod `p` by plain integer powering.
pub fn brute_order(x: u64, p: u64) -> u64 {
    let m = [0u64, 1, p - 1, x % p];
    let mul = |a: [u64; 4], b: [u64; 4]| {
        [
            (a[0] * b[0] + a[1] * b[2]) % p,
            (a[0] * b[1] + a[1] * b[3]) % p,
            (a[2] * b[0] + a[3] * b[2]) % p,
            (a[2] * b[1] + a[3] * b[3]) % p,
        ]
    };
    let mut acc = m;
    let mut e = 1;
    while acc != [1, 0, 0, 1] {
        acc = mul(acc, m);
        e += 1;
    }
    e
}

/// `(p, n, x)` where `s_set` disagrees with brute-force matrix orders,
/// over odd primes `p <= 97` and even `n <= 40`.
pub fn s_set_mismatches() -> Vec<(u64, u64, u64)> {
    let mut bad = Vec::new();
    for p in (3..=97u64).filter(|&v| fields::is_prime(v)) {
        for n in (2..=40u64).step_by(2) {
            let s = fields::s_set(n, p).unwrap();
            for x in 0..p {
                let e = brute_order(x, p);
                let member = n % e == 0 && (n / 2) % e != 0;
                if s.contains(x) != member {
                    bad.push((p, n, x));
                }
            }
        }
    }
    bad
}

#[derive(Debug, Default)]
pub struct DicksonTally {
    pub total: usize,
    pub generating: usize,
    pub proper: usize,
    pub disagreements: Vec<String>,
}

/// Capped and uncapped generation tests on sampled triples from
/// `PSL(2,f)` and `PGL(2,f)`, `f` in {5, 7, 11, 13}.
pub fn dickson_samples(seed: u64, per_group: usize) -> DicksonTally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = DicksonTally::default();
    for f in [5u64, 7, 11, 13] {
        for g in [families::build_psl2(f).unwrap(), families::build_pgl2(f).unwrap()] {
            let els = g.elements().unwrap();
            let invs = g.involutions().unwrap();
            for i in 0..per_group {
                let seeds: Vec<GroupElement> = match i % 3 {
                    0 => (0..3).map(|_| els[rng.gen_range(0..els.len())].clone()).collect(),
                    1 => (0..3).map(|_| invs[rng.gen_range(0..invs.len())].clone()).collect(),
                    _ => {
                        let a = &els[rng.gen_range(0..els.len())];
                        let b = &invs[rng.gen_range(0..invs.len())];
                        vec![a.clone(), g.mul(a, a), b.clone()]
                    }
                };
                let capped = g.generates_with(&seeds, true);
                if capped != g.generates_with(&seeds, false) {
                    tally.disagreements.push(format!("{} {seeds:?}", g.name()));
                }
                if capped {
                    tally.generating += 1;
                } else {
                    tally.proper += 1;
                }
                tally.total += 1;
            }
        }
    }
    tally
}
