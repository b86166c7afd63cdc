use std::fs;
use std::path::PathBuf;

use apsof::cli::parse_seed_list;
use apsof::imaging::{load_ppm, to_dataset, write_ppm};

fn corpus(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    assert!(!files.is_empty(), "empty corpus {target}");
    files.into_iter().map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())).collect()
}

#[test]
fn ppm_seeds_decode_or_fail_cleanly() {
    let mut decoded = 0;
    for target in ["decode_ppm", "ppm_roundtrip"] {
        for (name, bytes) in corpus(target) {
            if let Ok(image) = load_ppm(&bytes) {
                assert_eq!(load_ppm(&write_ppm(&image)).unwrap(), image, "{target}/{name}");
                decoded += 1;
            }
        }
    }
    assert!(decoded > 0);
}

#[test]
fn dataset_seeds_convert() {
    for (name, bytes) in corpus("ppm_to_dataset") {
        let (&side, file) = bytes.split_first().unwrap();
        let image = load_ppm(file).unwrap_or_else(|e| panic!("{name}: {e}"));
        let ds = to_dataset(&image, (side > 0).then_some(side as usize)).unwrap();
        if side > 0 {
            assert!(ds.width().max(ds.height()) <= side as usize, "{name}");
        }
    }
}

#[test]
fn seed_list_seeds_parse_or_fail_cleanly() {
    let ok = corpus("parse_seed_list")
        .into_iter()
        .filter(|(_, b)| parse_seed_list(std::str::from_utf8(b).unwrap()).is_ok())
        .count();
    assert!(ok > 0);
}
