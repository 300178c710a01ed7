mod common;

use aitlab_core::mtm::library;
use std::time::Instant;

#[test]
fn universal_machine_simulates_the_library() {
    for m in library::suite() {
        let start = Instant::now();
        let n = common::check_universality(&m.machine, 8, 40).unwrap_or_else(|e| panic!("{}: {e}", m.name));
        assert_eq!(n, 511);
        eprintln!("{}: {:?}", m.name, start.elapsed());
    }
}

#[test]
fn universal_machine_simulates_random_machines() {
    for (i, m) in common::random_machines(6, 99).iter().enumerate() {
        common::check_universality(m, 6, 40).unwrap_or_else(|e| panic!("random machine {i}: {e}"));
    }
}
