#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use conetop::cli::{parse_instance, Instance};
use conetop::monoid::Monoid;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus() -> Vec<Instance> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "inst"))
        .collect();
    files.sort();
    files.iter().map(|p| parse_instance(p).expect("corpus parses")).collect()
}

pub fn monoid(inst: &Instance) -> Arc<Monoid> {
    Arc::new(Monoid::new(inst.group.clone(), inst.monoid.clone()).expect("corpus monoid"))
}

/// Every point of `[-r, r]^rank x torsion` as plain integers, last coordinate fastest.
pub fn box_points(rank: usize, torsion: &[i64], r: i64) -> Vec<Vec<i64>> {
    let mut ranges: Vec<(i64, i64)> = vec![(-r, r); rank];
    ranges.extend(torsion.iter().map(|&d| (0, d - 1)));
    let mut out = vec![Vec::new()];
    for (lo, hi) in ranges {
        out = out
            .into_iter()
            .flat_map(|p| {
                (lo..=hi).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}
