use std::collections::BTreeMap;

use proptest::prelude::*;

use qfisize::datasets::{read_record, write_record, MeasurementRecord, RecordKind, Sample};

fn series_strategy() -> impl Strategy<Value = MeasurementRecord> {
    (
        prop::collection::vec((1e-6f64..1.0, -1.0f64..1.0, 0.0f64..0.5), 1..40),
        -2.0f64..0.0,
        1usize..4,
    )
        .prop_map(|(rows, start, modes)| {
            let mut t = start;
            let samples = rows
                .into_iter()
                .map(|(dt, v, s)| {
                    t += dt;
                    Sample::new(t, v, s)
                })
                .collect();
            let mut meta = BTreeMap::new();
            meta.insert("modes".to_string(), modes.to_string());
            meta.insert("note".to_string(), "lab run 3".to_string());
            MeasurementRecord::series(RecordKind::WignerCut, samples, meta).unwrap()
        })
}

proptest! {
    #[test]
    fn csv_round_trip_is_lossless(rec in series_strategy()) {
        let back = MeasurementRecord::from_csv(&rec.to_csv()).unwrap();
        prop_assert_eq!(back, rec);
    }

    #[test]
    fn parser_never_panics(text in "[#a-z_=,0-9.\\- \n]{0,200}") {
        let _ = MeasurementRecord::from_csv(&text);
    }
}

#[test]
fn histogram_pair_survives_the_filesystem() {
    let p: Vec<Sample> = [0.5, 0.3, 0.2].iter().enumerate().map(|(i, &v)| Sample::new(i as f64, v, 0.01)).collect();
    let q: Vec<Sample> = [0.4, 0.4, 0.2].iter().enumerate().map(|(i, &v)| Sample::new(i as f64, v, 0.01)).collect();
    let mut meta = BTreeMap::new();
    meta.insert("delta_theta".to_string(), "0.1".to_string());
    let rec = MeasurementRecord::histogram_pair(p, q, meta).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.csv");
    write_record(&rec, &path).unwrap();
    assert_eq!(read_record(&path).unwrap(), rec);
}

#[test]
fn unsorted_settings_are_rejected() {
    let samples = vec![Sample::new(0.1, 0.0, 0.0), Sample::new(0.0, 0.0, 0.0)];
    let mut meta = BTreeMap::new();
    meta.insert("modes".to_string(), "1".to_string());
    assert!(MeasurementRecord::series(RecordKind::WignerCut, samples, meta).is_err());
}

#[test]
fn variance_record_may_be_metadata_only() {
    let text = "# kind = variance_record\n# system = spin\n# particles = 100\n# variance = 0.5\n# z = 10\n";
    let rec = MeasurementRecord::from_csv(text).unwrap();
    assert_eq!(rec.kind, RecordKind::VarianceRecord);
    assert!(rec.samples.is_empty());
    let v = qfisize::bounds::VarianceRecord::from_record(&rec).unwrap();
    let b = qfisize::bounds::static_bound(&v).unwrap();
    assert!((b.qfi_lower - 50.0).abs() < 1e-12);

    let wigner = "# kind = wigner_cut\n# system = phase_space\n# theta0 = 0.1\n";
    assert!(MeasurementRecord::from_csv(wigner).is_err());
}
