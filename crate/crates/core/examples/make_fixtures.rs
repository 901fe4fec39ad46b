//! Regenerates the bundled datasets under `fixtures/`.
//!
//! ```text
//! cargo run -p ucurve --example make_fixtures -- fixtures
//! ```
//!
//! Every file is a synthetic stand-in with the shape of a public dataset; the
//! generators are seeded so the output is stable.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn write(dir: &Path, name: &str, body: &str) {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    println!("wrote {}", path.display());
}

/// 435 records of 16 yes/no/absent votes, two parties.
fn votes(rng: &mut ChaCha8Rng) -> String {
    let mut out = String::from("# votes-style: 16 ternary features (0=n, 1=y, 2=?), label last\n");
    // Probability of a "yes" for each party on each issue.
    let lean: Vec<(f64, f64)> = (0..16)
        .map(|i| {
            let strength = if i % 4 == 0 { 0.45 } else { 0.15 + 0.05 * (i % 3) as f64 };
            (0.5 + strength, 0.5 - strength)
        })
        .collect();
    for _ in 0..435 {
        let democrat = rng.gen_bool(0.61);
        let row: Vec<String> = lean
            .iter()
            .map(|&(d, r)| {
                if rng.gen_bool(0.04) {
                    return "2".into();
                }
                let p = if democrat { d } else { r };
                u8::from(rng.gen_bool(p.clamp(0.0, 1.0))).to_string()
            })
            .collect();
        let label = if democrat { "democrat" } else { "republican" };
        writeln!(out, "{},{label}", row.join(",")).unwrap();
    }
    out
}

/// 16 pen coordinates in 0..=100 for digits 0..9.
fn pendigits(rng: &mut ChaCha8Rng) -> String {
    let mut out = String::from("# pendigits-style: 16 integer features in 0..=100, 10 classes, label last\n");
    let prototypes: Vec<Vec<f64>> = (0..10)
        .map(|_| (0..16).map(|_| rng.gen_range(0.0..100.0)).collect())
        .collect();
    for _ in 0..1000 {
        let digit = rng.gen_range(0..10);
        let row: Vec<String> = prototypes[digit]
            .iter()
            .map(|&p| {
                let v: f64 = p + rng.gen_range(-30.0..30.0);
                (v.clamp(0.0, 100.0).round() as i64).to_string()
            })
            .collect();
        writeln!(out, "{},{digit}", row.join(",")).unwrap();
    }
    out
}

/// 4x4 binary windows labelled by a noisy local rule.
fn woperator(rng: &mut ChaCha8Rng) -> String {
    let mut out = String::from("# W-operator-style: 16 binary window pixels, 2 classes, label last\n");
    for _ in 0..1200 {
        let px: Vec<u8> = (0..16).map(|_| u8::from(rng.gen_bool(0.5))).collect();
        // Centre pixel majority with its horizontal neighbours.
        let votes = px[5] + px[6] + px[9] + px[10] + px[4] + px[11];
        let mut label = u8::from(votes >= 4 || (px[5] == 1 && px[10] == 1));
        if rng.gen_bool(0.08) {
            label ^= 1;
        }
        let row: Vec<String> = px.iter().map(u8::to_string).collect();
        writeln!(out, "{},{label}", row.join(",")).unwrap();
    }
    out
}

/// 15 samples of 27 gene expression levels, 3 conditions; label first.
fn bio(rng: &mut ChaCha8Rng) -> String {
    let mut out = String::from("# biological-style: 27 continuous expression levels, 3 classes, label first\n");
    let shifts: Vec<[f64; 3]> = (0..27)
        .map(|g| {
            if g < 6 {
                [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]
            } else {
                [0.0; 3]
            }
        })
        .collect();
    for s in 0..15 {
        let class = s % 3;
        let row: Vec<String> = shifts
            .iter()
            .map(|shift| format!("{:.4}", shift[class] + rng.gen_range(-1.0..1.0)))
            .collect();
        writeln!(out, "cond{class},{}", row.join(",")).unwrap();
    }
    out
}

/// Sparse records with 400 features, most of them rarely set.
fn dorothea(rng: &mut ChaCha8Rng) -> String {
    let mut out = String::from("# dorothea-style: sparse binary features, svmlight-like, 1-based indices\n");
    let density: Vec<f64> = (0..400)
        .map(|j| if j % 25 == 3 { 0.45 } else { rng.gen_range(0.0..0.08) })
        .collect();
    for _ in 0..300 {
        let active = rng.gen_bool(0.3);
        let mut cells = Vec::new();
        for (j, &d) in density.iter().enumerate() {
            let p = if active && j % 50 == 3 { (d + 0.3).min(1.0) } else { d };
            if rng.gen_bool(p) {
                cells.push(format!("{}:1", j + 1));
            }
        }
        let label = if active { "+1" } else { "-1" };
        writeln!(out, "{label} {}", cells.join(" ")).unwrap();
    }
    out
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    std::fs::create_dir_all(&dir).expect("create fixture directory");
    let mut rng = ChaCha8Rng::seed_from_u64(20_100_817);
    write(&dir, "votes16.csv", &votes(&mut rng));
    write(&dir, "pendigits16.csv", &pendigits(&mut rng));
    write(&dir, "woperator16.csv", &woperator(&mut rng));
    write(&dir, "bio27.csv", &bio(&mut rng));
    write(&dir, "dorothea_style.svm", &dorothea(&mut rng));
}
