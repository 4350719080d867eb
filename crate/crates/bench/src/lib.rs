//! Shared fixtures for the benchmark suites.

use zslab_core::generators::examples::{odometer_system, swap_loops_system, twisted_two_vertex_system};
use zslab_core::{odometer_zs, Ball, GroupElement, SemigroupElement, ZsData, ZsSystem};

/// The odometer together with the word ball of radius 4 and group ball of radius 3.
pub fn odometer_window() -> (ZsData, Ball<SemigroupElement>, Ball<GroupElement>) {
    let d = odometer_zs();
    let pb = d.p.enumerate_ball(4);
    let gb = d.g.enumerate_ball(3);
    (d, pb, gb)
}

/// The three systems used for the product-system benches.
pub fn systems() -> Vec<(&'static str, ZsSystem)> {
    vec![
        ("odometer", odometer_system(3, 2).expect("odometer builds")),
        ("swap-loops", swap_loops_system(3).expect("swap loops build")),
        ("twisted", twisted_two_vertex_system(2).expect("twisted system builds")),
    ]
}
