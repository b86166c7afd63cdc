#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(seeds) = apsof::cli::parse_seed_list(s) {
        assert!(!seeds.is_empty() && seeds.len() <= apsof::cli::MAX_SEEDS);
    }
});
