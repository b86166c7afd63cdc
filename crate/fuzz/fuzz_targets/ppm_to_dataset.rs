#![no_main]

use apsof::imaging::{load_ppm, reconstruct_quantized, to_dataset};
use apsof::model::assign_nearest;
use apsof::CenterSet;
use libfuzzer_sys::fuzz_target;

// First byte picks the downsampling side (0 = none), the rest is the file.
fuzz_target!(|data: &[u8]| {
    let Some((&side, file)) = data.split_first() else { return };
    let Ok(image) = load_ppm(file) else { return };
    if image.width().saturating_mul(image.height()) > 1 << 16 {
        return;
    }
    let max_side = (side > 0).then_some(side as usize);
    let dataset = to_dataset(&image, max_side).unwrap();
    assert!(dataset.as_slice().iter().all(|v| (0.0..=255.0).contains(v)));
    let centers = CenterSet::new(dataset.point(0).to_vec(), 3).unwrap();
    let labels = assign_nearest(&dataset, &centers).unwrap();
    let out = reconstruct_quantized(&dataset, &labels, &centers).unwrap();
    assert_eq!((out.width(), out.height()), (dataset.width(), dataset.height()));
});
