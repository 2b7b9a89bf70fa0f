use rayon::prelude::*;

use super::Image;
use crate::error::{invalid, Result};

/// `k`×`k` median filter with replicate (clamp-to-edge) borders.
///
/// `k` must be odd, so every window holds an odd number of samples and the
/// median is the exact middle order statistic.
pub fn median_filter(img: &Image, k: usize) -> Result<Image> {
    check_window(k)?;
    let mut window = Vec::with_capacity(k * k);
    Image::from_fn(img.height(), img.width(), |r, c| window_median(img, r, c, k, &mut window))
}

/// Same result as [`median_filter`], with rows processed on the rayon pool.
pub fn median_filter_parallel(img: &Image, k: usize) -> Result<Image> {
    check_window(k)?;
    let (h, w) = (img.height(), img.width());
    let data: Vec<f64> = (0..h)
        .into_par_iter()
        .flat_map_iter(|r| {
            let mut window = Vec::with_capacity(k * k);
            (0..w).map(move |c| window_median(img, r, c, k, &mut window)).collect::<Vec<_>>()
        })
        .collect();
    Image::from_vec(h, w, data)
}

fn check_window(k: usize) -> Result<()> {
    if k == 0 || k.is_multiple_of(2) {
        return invalid(format!("median window must be odd and positive, got {k}"));
    }
    Ok(())
}

fn window_median(img: &Image, r: usize, c: usize, k: usize, window: &mut Vec<f64>) -> f64 {
    let half = (k / 2) as isize;
    let (h, w) = (img.height() as isize, img.width() as isize);
    window.clear();
    for dr in -half..=half {
        let rr = (r as isize + dr).clamp(0, h - 1) as usize;
        for dc in -half..=half {
            let cc = (c as isize + dc).clamp(0, w - 1) as usize;
            window.push(img.get(rr, cc));
        }
    }
    let mid = window.len() / 2;
    *window.select_nth_unstable_by(mid, f64::total_cmp).1
}
