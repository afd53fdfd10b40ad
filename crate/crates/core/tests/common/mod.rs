//! Synthetic corpus shared by the integration tests.
#![allow(dead_code)]

pub mod oracles;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

pub const CATEGORIES: [(u64, &str); 5] = [(1, "person"), (2, "cat"), (3, "dog"), (4, "bird"), (5, "tree")];

/// (id, file, width, height)
pub const IMAGES: [(u64, &str, u32, u32); 3] = [
    (1, "img1.png", 64, 48),
    (2, "img2.png", 40, 40),
    (3, "img3.png", 32, 32),
];

/// Expected canonical listings, by image id.
pub fn gold_text(image_id: u64) -> &'static str {
    match image_id {
        1 => "1. person, 2. cat, 3. dog.",
        2 => "1. bird, 2. tree.",
        3 => "1. dog.",
        _ => unreachable!(),
    }
}

fn rect_poly(ann_id: u64, image_id: u64, cat: u64, x0: u32, y0: u32, x1: u32, y1: u32) -> Value {
    let (x0, y0, x1, y1) = (x0 as f64, y0 as f64, x1 as f64, y1 as f64);
    json!({
        "id": ann_id, "image_id": image_id, "category_id": cat,
        "segmentation": [[x0, y0, x1, y0, x1, y1, x0, y1]],
        "bbox": [x0, y0, x1 - x0, y1 - y0],
        "area": (x1 - x0) * (y1 - y0),
        "iscrowd": 0
    })
}

/// Column-major runs for an axis-aligned square, written out by hand.
fn square_rle(w: u32, h: u32, x0: u32, y0: u32, side: u32) -> Vec<u32> {
    let mut counts = Vec::new();
    let mut bg = x0 * h + y0;
    for col in 0..side {
        counts.push(bg);
        counts.push(side);
        bg = h - y0 - side + if col + 1 < side { y0 } else { 0 };
    }
    counts.push(bg + (w - x0 - side) * h);
    counts
}

pub fn annotations_json(ids: &[u64]) -> Value {
    let mut anns = Vec::new();
    if ids.contains(&1) {
        anns.push(rect_poly(11, 1, 1, 4, 2, 20, 14));
        anns.push(rect_poly(12, 1, 2, 30, 16, 50, 30));
        anns.push(rect_poly(13, 1, 3, 8, 34, 40, 46));
    }
    if ids.contains(&2) {
        anns.push(json!({
            "id": 21, "image_id": 2, "category_id": 4,
            "segmentation": {"size": [40, 40], "counts": square_rle(40, 40, 5, 5, 10)},
            "bbox": [5.0, 5.0, 10.0, 10.0], "area": 100.0, "iscrowd": 0
        }));
        anns.push(rect_poly(22, 2, 5, 22, 10, 34, 36));
    }
    if ids.contains(&3) {
        anns.push(rect_poly(31, 3, 3, 6, 6, 26, 26));
    }
    let images: Vec<Value> = IMAGES
        .iter()
        .filter(|i| ids.contains(&i.0))
        .map(|(id, f, w, h)| json!({"id": id, "file_name": f, "width": w, "height": h}))
        .collect();
    let cats: Vec<Value> = CATEGORIES.iter().map(|(id, n)| json!({"id": id, "name": n})).collect();
    json!({"images": images, "categories": cats, "annotations": anns})
}

pub fn source_pixels(w: u32, h: u32) -> image::RgbImage {
    image::RgbImage::from_fn(w, h, |x, y| image::Rgb([(x * 4) as u8, (y * 5) as u8, 128]))
}

pub struct Corpus {
    pub annotations: PathBuf,
    pub images: PathBuf,
}

/// Writes the annotation file and source PNGs for the chosen image ids.
pub fn write_corpus(dir: &Path, ids: &[u64]) -> Corpus {
    let images = dir.join("images");
    std::fs::create_dir_all(&images).unwrap();
    for (id, f, w, h) in IMAGES {
        if ids.contains(&id) {
            source_pixels(w, h).save(images.join(f)).unwrap();
        }
    }
    let annotations = dir.join("annotations.json");
    std::fs::write(&annotations, serde_json::to_vec_pretty(&annotations_json(ids)).unwrap()).unwrap();
    Corpus { annotations, images }
}

pub fn somkit() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_somkit"));
    c.env("RUST_LOG", "warn").env_remove("OPENAI_API_KEY");
    c
}

pub fn run(args: &[&str]) -> Output {
    somkit().args(args).output().expect("binary runs")
}

pub fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Sorted (name, bytes) of every file under `dir`.
pub fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

/// Random mask up to 64x64: either salt-and-pepper noise or a union of
/// rectangles, never empty.
pub fn random_mask(rng: &mut rand_chacha::ChaCha8Rng) -> (usize, usize, Vec<bool>) {
    use rand::Rng;
    let w = rng.random_range(1..=64usize);
    let h = rng.random_range(1..=64usize);
    let mut bits = vec![false; w * h];
    if rng.random_bool(0.3) {
        let p = rng.random_range(0.05..0.95);
        for b in bits.iter_mut() {
            *b = rng.random_bool(p);
        }
    } else {
        for _ in 0..rng.random_range(1..=5) {
            let (x0, y0) = (rng.random_range(0..w), rng.random_range(0..h));
            let (x1, y1) = (rng.random_range(x0..w) + 1, rng.random_range(y0..h) + 1);
            for y in y0..y1 {
                for x in x0..x1 {
                    bits[y * w + x] = true;
                }
            }
        }
    }
    if !bits.contains(&true) {
        bits[(h / 2) * w + w / 2] = true;
    }
    (w, h, bits)
}

/// Random simple-or-not polygon with 3..=10 vertices, partly off-grid.
pub fn random_polygon(rng: &mut rand_chacha::ChaCha8Rng) -> (u32, u32, Vec<f64>) {
    use rand::Rng;
    let w = rng.random_range(1..=48u32);
    let h = rng.random_range(1..=48u32);
    let n = rng.random_range(3..=10);
    let mut pts = Vec::with_capacity(2 * n);
    for _ in 0..n {
        pts.push(rng.random_range(-4.0..w as f64 + 4.0));
        pts.push(rng.random_range(-4.0..h as f64 + 4.0));
    }
    (w, h, pts)
}

/// Hand-computed (image, M, N) for the corrupted predictions in
/// `fixtures/eval`, scored with the default policy.
pub const EVAL_EXPECTED: [(u64, u64, u64); 10] = [
    (1, 3, 3), // verbatim
    (2, 0, 2), // swapped descriptions
    (3, 3, 4), // one wrong item
    (4, 2, 3), // case differences, last item missing
    (5, 0, 2), // no prediction at all
    (6, 4, 5), // duplicated description in the wrong slot
    (7, 1, 1), // gold name contained in a longer description
    (8, 2, 3), // out of order, repeated tag id keeps the first
    (9, 7, 9), // preamble line, two wrong
    (10, 2, 2), // extra item beyond gold is ignored
];

/// Mean of [`EVAL_EXPECTED`]: (1 + 0 + 3/4 + 2/3 + 0 + 4/5 + 1 + 2/3 + 7/9 + 1) / 10.
pub const EVAL_MEAN: (u64, u64) = (1199, 1800);
