//! Synthetic corpora shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub const CROSSWALK_DEFINITIONS: &str = "\
There name approach patterns \"pedestrian $walker approaches the crosswalk\", has walker.
There name wait patterns \"pedestrian $walker waits at the curb\", has walker.
There name enter-on-red patterns \"pedestrian $walker steps onto the road on red\", has walker.
There name safe-cross patterns \"pedestrian $walker crosses safely\", has walker.
There name injury patterns \"pedestrian $walker is injured by a car\", has walker.
";

/// Letter-only name, unique per index.
pub fn walker_name(i: usize) -> String {
    const ONSETS: [&str; 12] = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t"];
    const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];
    let mut n = i;
    let mut name = String::new();
    for _ in 0..3 {
        name.push_str(ONSETS[n % ONSETS.len()]);
        n /= ONSETS.len();
        name.push_str(VOWELS[n % VOWELS.len()]);
        n /= VOWELS.len();
    }
    name
}

/// One crosswalk episode as generated.
#[derive(Debug, Clone)]
pub struct Episode {
    pub walker: String,
    pub entered_on_red: bool,
    pub injured: bool,
}

/// `processes` episodes, ten ticks apart: approach, wait (with
/// enter-on-red at the same tick in half of them), then an outcome.
/// Injury has probability 0.9 after entering on red and 0.1 otherwise.
pub fn crosswalk_corpus(processes: usize, seed: u64) -> (String, Vec<Episode>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = Vec::new();
    let mut episodes = Vec::new();
    for i in 0..processes {
        let walker = walker_name(i);
        let base = i as i64 * 10;
        let entered_on_red = rng.gen_bool(0.5);
        let injured = rng.gen_bool(if entered_on_red { 0.9 } else { 0.1 });
        let mut push = |t: i64, text: String| {
            lines.push(json!({ "time": t, "source": format!("sim://crosswalk/{i}"), "text": text }).to_string());
        };
        push(base, format!("pedestrian {walker} approaches the crosswalk"));
        push(base + 1, format!("pedestrian {walker} waits at the curb"));
        if entered_on_red {
            push(base + 1, format!("pedestrian {walker} steps onto the road on red"));
        }
        if injured {
            push(base + 2, format!("pedestrian {walker} is injured by a car"));
        } else {
            push(base + 2, format!("pedestrian {walker} crosses safely"));
        }
        episodes.push(Episode { walker, entered_on_red, injured });
    }
    (lines.join("\n") + "\n", episodes)
}

pub const CROSSWALK_SEED: u64 = 0;

/// Writes the crosswalk definitions and corpus into `dir`.
pub fn write_crosswalk(dir: &Path, processes: usize, seed: u64) -> (PathBuf, PathBuf) {
    let defs = dir.join("crosswalk.defs");
    let corpus = dir.join("crosswalk.jsonl");
    std::fs::write(&defs, CROSSWALK_DEFINITIONS).unwrap();
    std::fs::write(&corpus, crosswalk_corpus(processes, seed).0).unwrap();
    (defs, corpus)
}
