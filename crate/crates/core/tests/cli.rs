use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use torospec::io::read_table_csv;
use torospec::mode::mode_value;
use torospec::spectrum::{offset_minor_radius, synthetic_measurement};
use torospec::{
    physical_frequency, special::scaled_prime_zero, special::scaled_zero, Family, Geometry,
    SpectralModel, SPEED_OF_LIGHT,
};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torospec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_measured(path: &Path, delta: f64, labelled: bool, keep: usize) {
    let nominal = Geometry::torus(0.010, 0.020).unwrap();
    let actual = offset_minor_radius(&nominal, delta).unwrap();
    let m = synthetic_measurement(
        &actual,
        &SpectralModel::TorusPerturbative,
        14e9,
        SPEED_OF_LIGHT,
        labelled,
    )
    .unwrap();
    let mut text = String::from("family,parity,k,n,m,f_hz\n");
    for line in m.lines.iter().take(keep) {
        match line.label {
            Some(id) => text.push_str(&format!(
                "{},{},{},{},{},{:.6}\n",
                id.family,
                id.parity.sign(),
                id.k,
                id.n,
                id.m,
                line.frequency
            )),
            None => text.push_str(&format!(",,,,,{:.6}\n", line.frequency)),
        }
    }
    fs::write(path, text).unwrap();
}

#[test]
fn spectrum_reference_torus() {
    let out = ok(&[
        "spectrum",
        "--torus-r",
        "10mm",
        "--torus-R",
        "20mm",
        "--fmax",
        "14GHz",
    ]);
    let rows = read_table_csv(out.stdout.as_slice()).unwrap();
    let ghz: Vec<f64> = rows.iter().map(|r| r.f_hz.unwrap() / 1e9).collect();
    assert!((ghz[0] - 8.704).abs() < 5e-4 && (ghz[1] - 8.866).abs() < 5e-4);
    let dm = rows.iter().find(|r| r.mode.to_string() == "TM010").unwrap();
    assert!((dm.f_hz.unwrap() / 1e9 - 11.659).abs() < 5e-4);
    let summary = String::from_utf8(out.stderr).unwrap();
    assert!(summary.contains("ground state: TE+110"), "{summary}");
    assert!(summary.contains("DM TM010"), "{summary}");
}

#[test]
fn spectrum_cylinder_ground_state_either_side_of_crossover() {
    // eps = 0.95 sits below the crossover at 0.9849, eps = 1 just above it
    let out = ok(&[
        "spectrum",
        "--cylinder-d",
        "19mm",
        "--cylinder-h",
        "20mm",
        "--fmax",
        "20GHz",
    ]);
    let rows = read_table_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(rows[0].mode.to_string(), "TE111");
    let out = ok(&[
        "spectrum",
        "--cylinder-d",
        "20mm",
        "--cylinder-h",
        "20mm",
        "--fmax",
        "20GHz",
    ]);
    let rows = read_table_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(rows[0].mode.to_string(), "TM010");
    assert_eq!(rows[1].mode.to_string(), "TE111");
}

#[test]
fn forbidden_torus_exits_2() {
    let out = run(&["spectrum", "--torus-r", "10mm", "--torus-R", "5mm"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("forbidden"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["flow", "--kind", "torus", "--eps", "0.9:0.1:0.1"][..],
        &["flow", "--kind", "torus", "--eps", "0.5:1.5:0.5"],
        &["spectrum", "--torus-r", "10mm", "--fmax", "14GHz"],
        &[
            "spectrum",
            "--torus-r",
            "10mm",
            "--torus-R",
            "20mm",
            "--cylinder-d",
            "1cm",
            "--cylinder-h",
            "1cm",
            "--fmax",
            "1GHz",
        ],
        &[
            "spectrum",
            "--torus-r",
            "10mm",
            "--torus-R",
            "20mm",
            "--fmax",
            "14GHz",
            "--model",
            "exact",
        ],
        &[
            "quality",
            "--torus-r",
            "10mm",
            "--torus-R",
            "20mm",
            "--frequency",
            "10GHz",
            "--material",
            "unobtainium",
        ],
        &["bogus"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn flow_asymptotes_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("flow.csv");
    ok(&[
        "flow",
        "--kind",
        "torus",
        "--eps",
        "0.01:0.999:0.001",
        "--fmax-F",
        "1.3",
        "--out",
        out.to_str().unwrap(),
    ]);
    let rows = read_table_csv(fs::File::open(&out).unwrap()).unwrap();
    assert!(!rows.is_empty());
    for row in rows.iter().filter(|r| r.eps == 0.01) {
        let z = match row.mode.family {
            Family::TE => scaled_prime_zero(row.mode.k, row.mode.n).unwrap(),
            Family::TM => scaled_zero(row.mode.k, row.mode.n).unwrap(),
        };
        // the eps term is of order (eps/pi)^2 m^2 at the first grid point
        let slack = (0.01 / std::f64::consts::PI).powi(2) * (row.mode.m as f64 + 1.0).powi(2);
        assert!((row.f_dimensionless - z).abs() <= slack, "{}", row.mode);
    }
    let sidecar: Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("flow.csv.asymptotes.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(sidecar["schema"], 1);
    assert!(!sidecar["asymptotes"].as_array().unwrap().is_empty());
}

#[test]
fn flow_named_mode() {
    let out = ok(&[
        "flow", "--kind", "torus", "--modes", "TM:0:1:0", "--eps", "0.5",
    ]);
    let rows = read_table_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 1);
    assert!((rows[0].f_dimensionless - 0.77779).abs() < 1e-5);
}

#[test]
fn flow_cylinder_crossing() {
    let out = ok(&["flow", "--kind", "cylinder", "--eps", "0.1:2.0:0.01"]);
    let rows = read_table_csv(out.stdout.as_slice()).unwrap();
    let curve = |name: &str| -> Vec<(f64, f64)> {
        rows.iter()
            .filter(|r| r.mode.to_string() == name)
            .map(|r| (r.eps, r.f_dimensionless))
            .collect()
    };
    let te = curve("TE111");
    let tm = curve("TM010");
    assert_eq!(te.len(), tm.len());
    let crossing = te
        .windows(2)
        .zip(tm.windows(2))
        .find(|(a, b)| (a[0].1 - b[0].1).signum() != (a[1].1 - b[1].1).signum())
        .map(|(a, _)| a[0].0)
        .unwrap();
    assert!((crossing - 0.98).abs() < 0.011, "{crossing}");
}

#[test]
fn chart_nodal_rows_and_anomalous_column() {
    let out = ok(&[
        "chart",
        "--r",
        "7mm,9mm",
        "--R",
        "7mm:40mm:0.5mm",
        "--count",
        "7",
    ]);
    let rows = read_table_csv(out.stdout.as_slice()).unwrap();
    for r in [0.007, 0.009] {
        let nodal: Vec<_> = rows
            .iter()
            .filter(|row| {
                (row.r_m.unwrap() - r).abs() < 1e-12 && (row.major_m.unwrap() - r).abs() < 1e-12
            })
            .collect();
        assert_eq!(nodal.len(), 7, "nodal rows at r = {r}");
        let mut te: Vec<(f64, f64)> = rows
            .iter()
            .filter(|row| (row.r_m.unwrap() - r).abs() < 1e-12 && row.mode.to_string() == "TE+110")
            .map(|row| (row.major_m.unwrap(), row.f_hz.unwrap()))
            .collect();
        te.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!(te.len() > 10);
        assert!(te.windows(2).all(|w| w[1].1 > w[0].1));
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        let a = dir.path().join(format!("a.{format}"));
        let b = dir.path().join(format!("b.{format}"));
        for p in [&a, &b] {
            ok(&[
                "chart",
                "--r",
                "7mm,9mm",
                "--R",
                "7mm:12mm:1mm",
                "--format",
                format,
                "--out",
                p.to_str().unwrap(),
            ]);
        }
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    }
}

#[test]
fn json_tables_carry_schema_and_columns() {
    let out = ok(&[
        "spectrum",
        "--torus-r",
        "1cm",
        "--torus-R",
        "2cm",
        "--fmax",
        "12GHz",
        "--format",
        "json",
    ]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["table"], "spectrum");
    assert_eq!(doc["columns"].as_array().unwrap().len(), 12);
    assert_eq!(doc["rows"][0]["family"], "TE");
}

#[test]
fn emitted_frequencies_revalidate() {
    let out = ok(&["chart", "--r", "5mm,10mm", "--R", "5mm:30mm:5mm"]);
    let rows = read_table_csv(out.stdout.as_slice()).unwrap();
    for row in rows {
        let g = Geometry::torus(row.r_m.unwrap(), row.major_m.unwrap()).unwrap();
        let v = mode_value(
            &row.mode,
            g.evaluation_aspect_ratio(),
            &SpectralModel::TorusPerturbative,
        )
        .unwrap();
        let f = physical_frequency(v.f, &g, SPEED_OF_LIGHT).unwrap();
        assert!(((row.f_hz.unwrap() - f) / f).abs() < 1e-8, "{}", row.mode);
        assert!(((row.f_dimensionless - v.f) / v.f).abs() < 1e-8);
        assert_eq!(row.extrapolated, v.extrapolated);
    }
}

fn calibrated_delta(report: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix("delta_r_m "))
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn calibrate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (delta, labelled) in [(2.5e-5, true), (-1.5e-4, false), (3e-4, false)] {
        let measured = dir.path().join("m.csv");
        let json = dir.path().join("cal.json");
        write_measured(&measured, delta, labelled, usize::MAX);
        let out = ok(&[
            "calibrate",
            "--torus-r",
            "10mm",
            "--torus-R",
            "20mm",
            "--measured",
            measured.to_str().unwrap(),
            "--out",
            json.to_str().unwrap(),
        ]);
        let got = calibrated_delta(&stdout(&out));
        assert!(((got - delta) / delta).abs() < 0.01, "{got} vs {delta}");
        let doc: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
        assert_eq!(doc["schema"], 1);
        assert!(((doc["delta_r_m"].as_f64().unwrap() - delta) / delta).abs() < 0.01);
    }
}

#[test]
fn calibrate_sensitivity() {
    let dir = tempfile::tempdir().unwrap();
    let measured = dir.path().join("m.csv");
    write_measured(&measured, 25e-6, true, usize::MAX);
    let out = ok(&[
        "calibrate",
        "--torus-r",
        "10mm",
        "--torus-R",
        "20mm",
        "--measured",
        measured.to_str().unwrap(),
    ]);
    let shift: f64 = stdout(&out)
        .lines()
        .find_map(|l| l.strip_prefix("mean_shift_hz "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((-30e6..=-18e6).contains(&shift), "{shift}");
}

#[test]
fn calibrate_two_lines_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let measured = dir.path().join("m.csv");
    write_measured(&measured, 25e-6, true, 2);
    let out = run(&[
        "calibrate",
        "--torus-r",
        "10mm",
        "--torus-R",
        "20mm",
        "--measured",
        measured.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn calibrate_unparseable_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let measured = dir.path().join("m.csv");
    fs::write(&measured, "family,parity,k,n,m,f_hz\nTE,1,1,1,0,lots\n").unwrap();
    let out = run(&[
        "calibrate",
        "--torus-r",
        "10mm",
        "--torus-R",
        "20mm",
        "--measured",
        measured.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn calibrate_without_bracket_exits_3() {
    // lines far below anything a 0.5 mm offset can reach
    let dir = tempfile::tempdir().unwrap();
    let measured = dir.path().join("m.csv");
    fs::write(
        &measured,
        "family,parity,k,n,m,f_hz\nTE,1,1,1,0,1e9\nTE,-1,1,1,0,1.1e9\nTM,0,0,1,0,1.2e9\n",
    )
    .unwrap();
    let out = run(&[
        "calibrate",
        "--torus-r",
        "10mm",
        "--torus-R",
        "20mm",
        "--measured",
        measured.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn quality_report_values() {
    let out = ok(&[
        "quality",
        "--torus-r",
        "10mm",
        "--torus-R",
        "20mm",
        "--frequency",
        "10GHz",
        "--format",
        "json",
    ]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema"], 1);
    let q = doc["q_ratio"].as_f64().unwrap();
    assert!((q / 6.1e3 - 1.0).abs() < 0.01, "{q}");
    let rows = doc["family_comparison"]["rows"].as_array().unwrap();
    assert_eq!(rows[0]["family"], "torus");
    let torus = rows[0]["q_ratio"].as_f64().unwrap();
    assert!(rows.iter().all(|r| r["q_ratio"].as_f64().unwrap() <= torus));
    assert_eq!(doc["lifetimes"].as_array().unwrap().len(), 3);

    let out = ok(&[
        "quality",
        "--torus-r",
        "10mm",
        "--torus-R",
        "20mm",
        "--frequency",
        "7.5GHz",
    ]);
    let text = stdout(&out);
    assert!(text.starts_with("section,key,value\n"));
    let tau: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("lifetime_s,1.00000000e11,"))
        .unwrap()
        .parse()
        .unwrap();
    assert!((tau / 2.12 - 1.0).abs() < 0.005);
}

#[test]
fn hidden_bessel_subcommand() {
    assert_eq!(stdout(&ok(&["bessel", "0", "1"])).trim(), "2.40482555770");
    assert_eq!(
        stdout(&ok(&["bessel", "1", "1", "--prime"])).trim(),
        "1.84118378134"
    );
    let help = stdout(&ok(&["--help"]));
    assert!(!help.contains("bessel"));
    assert_eq!(run(&["bessel", "21", "1"]).status.code(), Some(2));
}
