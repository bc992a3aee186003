//! Events file to calibrated coefficients, through the on-disk formats.

use intensity_core::calibration::{calibrate, Outcome};
use intensity_core::engine::Param;
use intensity_core::events::{aggregate, load_events, write_arrivals, write_info, write_regions, EventColumns};
use intensity_core::io::{read_calibration_inputs, InputPaths, Method, ModelType};
use intensity_core::spatial::{discretize_rect, Border};
use intensity_core::temporal::{TimeDiscretization, TimeUnit, UniformPeriodic};

fn sample_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/events_sample.csv")
}

#[test]
fn events_to_coefficients() {
    let cols = EventColumns::new("date_time", "lat", "long", &["priority"]);
    let table = load_events(&sample_path(), &cols).unwrap();
    assert_eq!(table.len(), 18);

    let border = Border::rectangle(&table.locations()).unwrap();
    let mut rs = discretize_rect(&border, 3, 2).unwrap();
    for id in 0..rs.len() {
        let area = rs.region(id).area_km2;
        rs.set_attribute(id, "area", area);
    }
    let discs = vec![
        TimeDiscretization::Uniform(UniformPeriodic::new(TimeUnit::Hour, 6, 24).unwrap()),
        TimeDiscretization::Uniform(UniformPeriodic::new(TimeUnit::Day, 1, 7).unwrap()),
    ];
    let agg = aggregate(&table, &discs, &rs).unwrap();
    // The border is the events' bounding box, so nothing is dropped.
    assert_eq!(agg.total(), 18);
    assert_eq!(agg.dropped(), 0);

    let dir = tempfile::tempdir().unwrap();
    let paths = InputPaths {
        info: Some(dir.path().join("info.txt")),
        arrivals: Some(dir.path().join("arrivals.txt")),
        neighbors: Some(dir.path().join("neighbors.txt")),
        ..InputPaths::default()
    };
    write_info(&agg, 1, paths.info.as_ref().unwrap()).unwrap();
    write_arrivals(&agg, paths.arrivals.as_ref().unwrap()).unwrap();
    write_regions(&rs, &["area".to_string()], paths.neighbors.as_ref().unwrap()).unwrap();

    let bundle = read_calibration_inputs(&paths, ModelType::Reg, Method::Calibration).unwrap();
    assert_eq!(bundle.info.periods, 4);
    assert_eq!(bundle.info.weekdays, 7);
    assert_eq!(bundle.info.zones, rs.len());
    assert_eq!(bundle.arrivals.iter().map(|e| e.count).sum::<u64>(), 18);

    let param = Param { max_iter: 50, ..Param::default() };
    let Outcome::Coefficients(report) = calibrate(&bundle, ModelType::Reg, Method::Calibration, &param, None, None).unwrap()
    else {
        panic!("expected coefficients");
    };
    assert_eq!(report.x.dim(), (bundle.info.types, 7, 4, 1));
    assert!(report.x.iter().all(|b| *b >= 0.0 && b.is_finite()));
}
