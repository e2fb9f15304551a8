use jointcal::data_io::{load_panel, save_panel, SchemaConfig};
use jointcal::simulation::{synthetic_panel, PanelSpec};
use jointcal::BatesParams;

#[test]
fn thousand_row_panel_survives_save_and_load() {
    let spec = PanelSpec {
        n_dates: 3,
        ..PanelSpec::default()
    };
    let mut rows = synthetic_panel(&BatesParams::baseline(), &spec).unwrap();
    while rows.len() < 1000 {
        let extra = rows.clone();
        rows.extend(extra);
    }
    rows.truncate(1000);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("panel.csv");
    let schema = SchemaConfig::default();
    save_panel(&path, &rows, &schema).unwrap();
    let loaded = load_panel(&path, &schema).unwrap();

    assert!(loaded.rejects.is_empty(), "{:?}", loaded.rejects);
    assert_eq!(loaded.rows.len(), 1000);
    assert_eq!(loaded.rows, rows);
}

#[test]
fn option_metrics_layout_round_trips_scaled_strikes() {
    let rows = synthetic_panel(&BatesParams::baseline(), &PanelSpec::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("om.csv");
    let schema = SchemaConfig::option_metrics();
    save_panel(&path, &rows, &schema).unwrap();

    let header = std::fs::read_to_string(&path).unwrap();
    let header = header.lines().next().unwrap();
    assert!(header.contains(&schema.strike));

    let loaded = load_panel(&path, &schema).unwrap();
    assert_eq!(loaded.rows.len(), rows.len());
    for (a, b) in loaded.rows.iter().zip(&rows) {
        assert!((a.strike - b.strike).abs() < 1e-9 * b.strike);
    }
}
