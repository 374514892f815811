#![allow(dead_code)]

use wtsched::gen::{self, Family, GenParams};
use wtsched::model::Instance;

/// Small overloaded instance: releases in `[0, n*p]`, windows up to `3p`.
pub fn small(family: Family, n: usize, p: i64, seed: u64) -> Instance {
    let params = GenParams {
        n,
        p,
        horizon: n as i64 * p,
        max_window: 3 * p,
        max_weight: 10,
        seed,
        family,
    };
    gen::generate(&params).unwrap().normalize().unwrap()
}

/// Every combination of family, `p` and `n` in the given ranges, `per` seeds each.
pub fn sweep(ns: std::ops::RangeInclusive<usize>, ps: &[i64], per: u64, base_seed: u64) -> Vec<Instance> {
    let mut out = Vec::new();
    let mut seed = base_seed;
    for family in Family::ALL {
        for &p in ps {
            for n in ns.clone() {
                for _ in 0..per {
                    out.push(small(family, n, p, seed));
                    seed += 1;
                }
            }
        }
    }
    out
}
