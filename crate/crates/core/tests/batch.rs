mod common;

use std::fs;
use std::path::{Path, PathBuf};

use lisa_core::batch::{emit_histograms, run_batch, run_batch_files, DIAMETER_HIST_FILE, SCATTERER_RANGE_HIST_FILE};
use lisa_core::scan_io::{read_labels, read_scan, read_scan_text, write_scan, write_scan_text};
use lisa_core::*;

fn write_scans(dir: &Path, n: usize, points: usize) -> Vec<PathBuf> {
    fs::create_dir_all(dir).unwrap();
    (0..n)
        .map(|i| {
            let p = dir.join(format!("{i:06}.bin"));
            write_scan(&ScanBuffer::new(common::synthetic_scan(points, 1.0, 120.0, i as u64)), &p).unwrap();
            p
        })
        .collect()
}

fn read_table(path: &Path) -> Vec<(f64, f64)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let mut it = l.split_whitespace().map(|t| t.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect()
}

#[test]
fn sampled_rain_rates_average_twenty() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    write_scans(&input, 1000, 4);
    let mut cfg = RunConfig::new(Model::Lisa, WeatherSelection::SampleRainRate, &input, tmp.path().join("out"));
    cfg.seed = 42;
    let report = run_batch(&cfg).unwrap();
    assert_eq!(report.scans.len(), 1000);
    let mean = report.mean_rain_rate().unwrap();
    assert!((mean - 20.0).abs() <= 1.0, "{mean}");
    assert_eq!(report.rain_rate_histogram().total(), 1000);
}

#[test]
fn degenerate_weather_copies_detectable_points() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    fs::create_dir_all(&input).unwrap();
    let scans: Vec<ScanBuffer> = (0..3)
        .map(|i| ScanBuffer::new(common::synthetic_scan(2000, 0.5, 150.0, 50 + i)))
        .collect();
    write_scan(&scans[0], input.join("a.bin")).unwrap();
    write_scan(&scans[1], input.join("b.bin")).unwrap();
    write_scan_text(&scans[2], input.join("c.txt")).unwrap();

    let out = tmp.path().join("out");
    let mut cfg = RunConfig::new(Model::Lisa, WeatherSelection::RainRate(0.0), &input, &out);
    cfg.sensor.range_accuracy = 0.0;
    let report = run_batch(&cfg).unwrap();
    assert!(report.failures.is_empty());

    let p_min = 0.9 / (cfg.sensor.r_max * cfg.sensor.r_max);
    for (name, scan) in ["a.bin", "b.bin", "c.txt"].iter().zip(&scans) {
        let path = out.join(name);
        let got = if name.ends_with(".txt") { read_scan_text(&path) } else { read_scan(&path) }.unwrap();
        let labels = read_labels(path.with_extension("label")).unwrap();
        assert_eq!(got.len(), scan.len());
        for ((p, q), l) in scan.points.iter().zip(&got.points).zip(&labels.labels) {
            let r = p.range();
            if p.reflectivity as f64 / (r * r) >= p_min {
                assert_eq!((q, *l), (p, Label::Original));
            } else {
                assert_eq!(*l, Label::Lost);
            }
        }
    }
}

#[test]
fn report_reconciles_with_sidecars_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    let files = write_scans(&input, 5, 3000);
    let run = |out: &str, files: &[PathBuf]| {
        let out = tmp.path().join(out);
        let mut cfg = RunConfig::new(Model::Lisa, WeatherSelection::RainRate(35.0), &input, &out);
        cfg.seed = 42;
        cfg.stats = Some(tmp.path().join(format!("{}.txt", out.display())));
        let report = run_batch_files(&cfg, files).unwrap();
        (report, fs::read_to_string(cfg.stats.unwrap()).unwrap(), out)
    };
    let (report, text, out) = run("a", &files);
    assert!(text.starts_with("# lisa-report v1\n"));
    for s in &report.scans {
        let labels = read_labels(out.join(&s.name).with_extension("label")).unwrap();
        let count = |l| labels.labels.iter().filter(|&&x| x == l).count() as u64;
        assert_eq!(
            (s.lost, s.scattered, s.original),
            (count(Label::Lost), count(Label::Scattered), count(Label::Original))
        );
        assert_eq!(s.lost + s.scattered + s.original, s.points);
        assert_eq!(s.rain_rate, Some(35.0));
    }
    let mut shuffled = files.clone();
    shuffled.rotate_left(2);
    let (_, text2, _) = run("b", &shuffled);
    assert_eq!(text, text2);
}

#[test]
fn bad_scans_are_reported_and_run_continues() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    write_scans(&input, 2, 100);
    fs::write(input.join("broken.bin"), [0u8; 17]).unwrap();
    write_scan(
        &ScanBuffer::new(vec![PointRecord::new(5.0, 0.0, 0.0, 1.5)]),
        input.join("bright.bin"),
    )
    .unwrap();
    fs::write(input.join("notes.md"), "ignored").unwrap();
    let cfg = RunConfig::new(Model::Lisa, WeatherSelection::RainRate(5.0), &input, tmp.path().join("out"));
    let report = run_batch(&cfg).unwrap();
    assert_eq!(report.scans.len(), 2);
    let failed: Vec<_> = report.failures.iter().map(|f| f.name.as_str()).collect();
    assert_eq!(failed, ["bright.bin", "broken.bin"]);
    assert!(report.failures[0].error.contains("reflectivity"));
    assert!(report.to_text().contains("failed 2"));
}

#[test]
fn usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty");
    fs::create_dir_all(&empty).unwrap();
    let cfg = RunConfig::new(Model::Lisa, WeatherSelection::RainRate(5.0), &empty, tmp.path().join("out"));
    assert!(matches!(run_batch(&cfg), Err(Error::InvalidArgument(_))));

    let input = tmp.path().join("in");
    write_scans(&input, 1, 10);
    let cfg = RunConfig::new(Model::Lisa, WeatherSelection::Preset("moderate_advection_fog".into()), &input, tmp.path().join("o"));
    assert!(run_batch(&cfg).is_err());
    let cfg = RunConfig::new(Model::Lisa, WeatherSelection::Preset("monsoon".into()), &input, tmp.path().join("o"));
    assert!(matches!(run_batch(&cfg), Err(Error::Config(_))));
}

#[test]
fn fog_preset_with_mini_lisa() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    write_scans(&input, 3, 2000);
    let cfg = RunConfig::new(
        Model::MiniLisa,
        WeatherSelection::Preset("strong_advection_fog".into()),
        &input,
        tmp.path().join("out"),
    );
    let report = run_batch(&cfg).unwrap();
    let alpha = report.scans[0].alpha;
    assert!(report.scans.iter().all(|s| s.alpha == alpha && s.scattered == 0 && s.rain_rate.is_none()));
}

#[test]
fn histogram_shapes() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    fs::create_dir_all(&input).unwrap();
    let far: Vec<PointRecord> = (0..60).map(|i| PointRecord::new(70.0 + i as f32 * 0.1, 0.0, -1.0, 0.3)).collect();
    write_scan(&ScanBuffer::new(far), input.join("far.bin")).unwrap();
    let mut cfg = RunConfig::new(Model::Lisa, WeatherSelection::RainRate(25.0), &input, tmp.path().join("out"));
    cfg.sampling = ScattererSampling::Exhaustive;
    let report = run_batch(&cfg).unwrap();
    assert!(report.range_hist.total() >= 100_000, "{}", report.range_hist.total());

    let dir = tmp.path().join("hist");
    emit_histograms(&report, &dir).unwrap();

    // Range counts proportional to r^2.
    let t = read_table(&dir.join(SCATTERER_RANGE_HIST_FILE));
    let c = t.iter().map(|(x, y)| x * x * y).sum::<f64>() / t.iter().map(|(x, _)| x.powi(4)).sum::<f64>();
    let mean = t.iter().map(|(_, y)| y).sum::<f64>() / t.len() as f64;
    let ss_res: f64 = t.iter().map(|(x, y)| (y - c * x * x).powi(2)).sum();
    let ss_tot: f64 = t.iter().map(|(_, y)| (y - mean).powi(2)).sum();
    let r2 = 1.0 - ss_res / ss_tot;
    assert!(r2 >= 0.99, "{r2}");

    // Log counts linear in diameter with slope -lambda.
    let t: Vec<(f64, f64)> = read_table(&dir.join(DIAMETER_HIST_FILE))
        .into_iter()
        .filter(|&(_, y)| y >= 100.0)
        .map(|(x, y)| (x, y.ln()))
        .collect();
    let n = t.len() as f64;
    let (mx, my) = (t.iter().map(|p| p.0).sum::<f64>() / n, t.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = t.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / t.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>();
    let lambda = MarshallPalmerPsd::from_rain_rate(25.0).unwrap().lambda;
    assert!((slope + lambda).abs() <= 0.05 * lambda, "{slope} vs {}", -lambda);
}
