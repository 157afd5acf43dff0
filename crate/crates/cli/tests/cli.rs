use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn divtool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divtool")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn divider_writes_csv_and_svg() {
    let dir = tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = divtool(&["divider", "--preset", "ellipse:2,1", "--n-grid", "128", "--out", out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path(), "divider.csv");
    let mut lines = csv.lines();
    let hash = lines.next().unwrap();
    assert!(hash.starts_with("# config_hash=") && hash.len() == "# config_hash=".len() + 16);
    assert!(lines.next().unwrap().starts_with("index,side,kind,t1,t2,x10,x20,radius"));
    assert!(csv.contains(",endpoint,"));
    let svg = read(dir.path(), "divider.svg");
    assert!(svg.starts_with("<svg") && svg.contains("stroke=\"red\""));
}

#[test]
fn output_is_deterministic() {
    let (a, b) = (tempdir().unwrap(), tempdir().unwrap());
    for d in [&a, &b] {
        let o = divtool(&["divider", "--preset", "hypotrochoid:5,1,2", "--n-grid", "200", "--out", d.path().to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    for name in ["divider.csv", "divider.svg"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# settings\npreset = ellipse:2,1\nn_grid = 64\n").unwrap();
    let from_file = dir.path().join("file");
    let from_flag = dir.path().join("flag");
    let o = divtool(&["divider", "--config", cfg.to_str().unwrap(), "--out", from_file.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = divtool(&["divider", "--config", cfg.to_str().unwrap(), "--n-grid", "128", "--out", from_flag.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let rows = |d: &Path| read(d, "divider.csv").lines().count() - 2;
    assert_eq!(rows(&from_file), 33);
    assert_eq!(rows(&from_flag), 65);
    assert_ne!(read(&from_file, "divider.csv").lines().next(), read(&from_flag, "divider.csv").lines().next());

    fs::write(&cfg, "n_grid = 64\ncolour = red\n").unwrap();
    let o = divtool(&["divider", "--preset", "circle:1", "--config", cfg.to_str().unwrap(), "--out", from_file.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn evolute_and_lclt_field() {
    let dir = tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = divtool(&["evolute", "--preset", "ellipse:2,1", "--out", out]);
    assert_eq!(code(&o), 0);
    assert_eq!(read(dir.path(), "evolute.csv").lines().count(), 2 + 4);
    let o = divtool(&["lclt-field", "--preset", "ellipse:2,1", "--res", "32x16", "--out", out]);
    assert_eq!(code(&o), 0);
    let pgm = read(dir.path(), "lclt.pgm");
    assert!(pgm.starts_with("P2\n32 16\n255\n"));
    assert_eq!(read(dir.path(), "lclt.csv").lines().count(), 2 + 32 * 16);
}

#[test]
fn lattice_rectangle() {
    let dir = tempdir().unwrap();
    let input = dir.path().join("rect.pbm");
    let mut text = String::from("P1\n12 6\n");
    for y in 0..6 {
        let row: Vec<&str> = (0..12).map(|x| if (1..11).contains(&x) && (1..5).contains(&y) { "1" } else { "0" }).collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    fs::write(&input, text).unwrap();
    let o = divtool(&["lattice", input.to_str().unwrap(), "--metric", "maxcoord", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let pbm = read(dir.path(), "lattice.pbm");
    let rows: Vec<&str> = pbm.lines().skip(2).collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[2], "0 0 1 1 1 1 1 1 1 1 0 0");
    assert_eq!(rows[3], rows[2]);
    assert_eq!(read(dir.path(), "lattice.csv").lines().count(), 2 + 16);
}

#[test]
fn exit_codes() {
    let dir = tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let empty = dir.path().join("empty.pbm");
    fs::write(&empty, "P1\n3 3\n0 0 0\n0 0 0\n0 0 0\n").unwrap();
    assert_eq!(code(&divtool(&["lattice", empty.to_str().unwrap(), "--out", out])), 1);
    assert_eq!(code(&divtool(&["divider", "--preset", "ellipse:2,1", "--bogus"])), 1);
    assert_eq!(code(&divtool(&["divider", "--preset", "ellipse:-2,1", "--out", out])), 1);
    assert_eq!(code(&divtool(&["divider", "--out", out])), 1);
    assert_eq!(code(&divtool(&["--help"])), 0);
    let o = divtool(&["validate", "--preset", "parabola:0.25", "--n-grid", "128", "--out", out]);
    assert_eq!(code(&o), 0);
    assert!(read(dir.path(), "violations.csv").lines().count() == 2);
}

#[test]
fn sampled_points_file() {
    let dir = tempdir().unwrap();
    let pts = dir.path().join("pts.txt");
    let rows: Vec<String> = (0..120)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / 120.0;
            format!("{} {}", 2.0 * t.cos(), t.sin())
        })
        .collect();
    fs::write(&pts, rows.join("\n")).unwrap();
    let o = divtool(&["divider", "--points", pts.to_str().unwrap(), "--closed", "--n-grid", "128", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path(), "divider.csv");
    let max_x2 = csv
        .lines()
        .skip(2)
        .filter(|l| l.contains(",left,"))
        .map(|l| l.split(',').nth(6).unwrap().parse::<f64>().unwrap().abs())
        .fold(0.0, f64::max);
    assert!(max_x2 < 1e-2, "{max_x2}");
}
