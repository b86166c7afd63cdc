#![no_main]

use apsof::imaging::{load_ppm, write_ppm};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(image) = load_ppm(data) {
        let encoded = write_ppm(&image);
        assert_eq!(load_ppm(&encoded).unwrap(), image);
    }
});
