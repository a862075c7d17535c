//! Writes the synthetic train/test fixtures used by the tests.
//!
//! The rows follow the 45-column flow-record layout with class-dependent
//! distributions, so the classifiers have real (but imperfect) signal.
//!
//! ```text
//! cargo run -p nidsbench-core --example gen_fixture -- crates/core/fixtures
//! ```

use std::path::PathBuf;

use nidsbench_core::dataset::{ColumnKind, Schema, CLASS_NAMES};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NORMAL: usize = 6;
const PROTOS: [&str; 5] = ["tcp", "udp", "arp", "ospf", "unas"];
const SERVICES: [&str; 5] = ["-", "http", "dns", "ftp", "smtp"];
const STATES: [&str; 4] = ["FIN", "INT", "CON", "REQ"];

/// Roughly standard normal (Irwin-Hall with 12 terms).
fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    (0..12).map(|_| rng.random::<f64>()).sum::<f64>() - 6.0
}

fn is_count(name: &str) -> bool {
    !matches!(
        name,
        "dur" | "rate" | "sload" | "dload" | "sinpkt" | "dinpkt" | "sjit" | "djit" | "tcprtt" | "synack" | "ackdat"
    )
}

struct Profile {
    /// log10 of the typical value of every numeric column.
    log_mean: Vec<f64>,
    proto: [f64; 5],
    service: [f64; 5],
    state: [f64; 4],
}

fn pick<const N: usize>(rng: &mut ChaCha8Rng, w: &[f64; N]) -> usize {
    let total: f64 = w.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, &x) in w.iter().enumerate() {
        if u < x {
            return i;
        }
        u -= x;
    }
    N - 1
}

fn profiles(n_numeric: usize, rng: &mut ChaCha8Rng) -> Vec<Profile> {
    let base: Vec<f64> = (0..n_numeric).map(|_| rng.random_range(0.0..3.0)).collect();
    (0..CLASS_NAMES.len())
        .map(|c| {
            let shift = if c == NORMAL { 0.0 } else { 1.0 };
            Profile {
                log_mean: base
                    .iter()
                    .map(|b| b + shift * rng.random_range(-1.2..1.2))
                    .collect(),
                proto: std::array::from_fn(|i| if c == NORMAL && i > 1 { 0.05 } else { rng.random_range(0.1..1.0) }),
                service: std::array::from_fn(|_| rng.random_range(0.1..1.0)),
                state: std::array::from_fn(|_| rng.random_range(0.1..1.0)),
            }
        })
        .collect()
}

fn write(path: &PathBuf, counts: &[usize], profiles: &[Profile], rng: &mut ChaCha8Rng, first_id: usize) {
    let schema = Schema::unsw_nb15();
    let mut classes: Vec<usize> = counts
        .iter()
        .enumerate()
        .flat_map(|(c, &n)| std::iter::repeat_n(c, n))
        .collect();
    classes.shuffle(rng);

    let mut w = csv::Writer::from_path(path).expect("create fixture");
    w.write_record(schema.names()).unwrap();
    for (row, &c) in classes.iter().enumerate() {
        let p = &profiles[c];
        let mut numeric_idx = 0;
        let rec: Vec<String> = schema
            .names()
            .map(|name| match name {
                "id" => {
                    numeric_idx += 1;
                    (first_id + row).to_string()
                }
                "proto" => PROTOS[pick(rng, &p.proto)].to_string(),
                "service" => SERVICES[pick(rng, &p.service)].to_string(),
                "state" => STATES[pick(rng, &p.state)].to_string(),
                "attack_cat" => CLASS_NAMES[c].to_string(),
                "label" => u8::from(c != NORMAL).to_string(),
                "ct_state_ttl" => {
                    numeric_idx += 1;
                    let v = if c == NORMAL { 0 } else { 1 + (c % 2) };
                    if rng.random::<f64>() < 0.15 { rng.random_range(0..3) } else { v }.to_string()
                }
                "is_ftp_login" | "is_sm_ips_ports" => {
                    numeric_idx += 1;
                    u8::from(rng.random::<f64>() < 0.1).to_string()
                }
                _ => {
                    let m = p.log_mean[numeric_idx - 1];
                    numeric_idx += 1;
                    let v = 10f64.powf(m + 0.35 * gauss(rng)) - 1.0;
                    let v = v.max(0.0);
                    if is_count(name) {
                        format!("{}", v.round())
                    } else {
                        format!("{v:.6}")
                    }
                }
            })
            .collect();
        w.write_record(&rec).unwrap();
    }
    w.flush().unwrap();
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "crates/core/fixtures".into()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    // log_mean is indexed by position among numeric columns, `id` included
    let n_numeric = Schema::unsw_nb15()
        .columns
        .iter()
        .filter(|c| c.kind == ColumnKind::Numeric)
        .count();
    let profiles = profiles(n_numeric, &mut rng);

    let train: Vec<usize> = (0..10).map(|c| if c == NORMAL { 74 } else { 14 }).collect();
    let test: Vec<usize> = (0..10).map(|c| if c == NORMAL { 37 } else { 7 }).collect();
    write(&dir.join("unsw_train.csv"), &train, &profiles, &mut rng, 1);
    write(&dir.join("unsw_test.csv"), &test, &profiles, &mut rng, 1);
    println!("wrote fixtures to {}", dir.display());
}
