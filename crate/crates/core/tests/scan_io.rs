mod common;

use std::fs;
use std::time::Instant;

use lisa_core::scan_io::{read_scan, write_scan};
use lisa_core::ScanBuffer;

#[test]
fn random_scan_roundtrip_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("s.bin");
    let scan = ScanBuffer::new(common::synthetic_scan(10_000, 0.1, 200.0, 1));
    write_scan(&scan, &p).unwrap();
    let bytes = fs::read(&p).unwrap();
    assert_eq!(bytes.len(), 160_000);
    let back = read_scan(&p).unwrap();
    assert_eq!(back, scan);
    write_scan(&back, &p).unwrap();
    assert_eq!(fs::read(&p).unwrap(), bytes);
}

#[test]
fn million_point_scan_loads_quickly() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("big.bin");
    write_scan(&ScanBuffer::new(common::synthetic_scan(1_000_000, 0.1, 200.0, 2)), &p).unwrap();
    let t = Instant::now();
    let s = read_scan(&p).unwrap();
    let secs = t.elapsed().as_secs_f64();
    assert_eq!(s.len(), 1_000_000);
    assert!(secs < 1.0, "{secs}");
}
