use std::fs;
use std::path::Path;

use dpoinar::io::{
    load_counts, load_draws, read_counts, save_counts, save_draws, save_exposure, DrawsHeader, DRAWS_VERSION,
};
use dpoinar::study::scenario_by_name;
use dpoinar::{run_chains_parallel, Error};
use dpoinar_core::{PosteriorDraws, RateMode, SamplerConfig};

fn parse(text: &str) -> dpoinar::Result<dpoinar_core::CountPanel> {
    read_counts(text.as_bytes(), Path::new("inline.csv"))
}

#[test]
fn two_by_three_panel() {
    let panel = parse("series_id,2001-01-01,2001-01-08,2001-01-15\na,0,1,2\nb,3,0,0\n").unwrap();
    assert_eq!(panel.n_series(), 2);
    assert_eq!(panel.n_times(), 3);
    assert_eq!(panel.series(0), [0, 1, 2]);
    assert_eq!(panel.series(1), [3, 0, 0]);
    assert_eq!(panel.series_ids(), ["a", "b"]);
}

#[test]
fn january_dates_map_to_january() {
    let panel = parse("series_id,2001-01-01,2001-01-08,2001-01-15\na,0,1,2\n").unwrap();
    let months: Vec<usize> = panel.season().months().collect();
    assert_eq!(months, [0, 0, 0]);
    // Week of 2001-01-29 starts in January; the next one in February.
    assert_eq!(panel.season().month_at(4), Some(0));
    assert_eq!(panel.season().month_at(5), Some(1));
}

#[test]
fn negative_cell_names_the_cell() {
    let err = parse("series_id,2001-01-01,2001-01-08\na,0,1\nb,2,-1\n").unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, Error::Parse { .. }));
    assert!(msg.contains("row 3"), "{msg}");
    assert!(msg.contains("column 3"), "{msg}");
    assert!(msg.contains("`-1`"), "{msg}");
}

#[test]
fn malformed_inputs() {
    let cases = [
        ("series_id,2001-01-01,2001-01-08\na,0,1\nb,2\n", "fields"),
        ("series_id,2001-01-01\na,1.5\n", "non-negative integer"),
        ("series_id,2001-13-01\na,1\n", "date"),
        ("id,2001-01-01\na,1\n", "series_id"),
        ("series_id,2001-01-01\na,1\na,2\n", "already defined"),
    ];
    for (text, needle) in cases {
        let msg = parse(text).unwrap_err().to_string();
        assert!(msg.contains(needle), "{text:?}: {msg}");
    }
}

#[test]
fn saved_simulation_reloads_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let sim = scenario_by_name("hard-0.5").unwrap().with_series(12).simulate(3).unwrap();
    let path = dir.path().join("counts.csv");
    save_counts(&sim.panel, &path).unwrap();
    assert_eq!(load_counts(&path, None).unwrap(), sim.panel);
}

#[test]
fn exposure_join_is_strict() {
    let dir = tempfile::tempdir().unwrap();
    let counts = dir.path().join("counts.csv");
    fs::write(&counts, "series_id,2001-01-01,2001-01-08\na,0,1\nb,2,3\n").unwrap();
    let exposure = dir.path().join("exposure.csv");
    fs::write(&exposure, "series_id,exposure\nb,2.5\na,0.5\n").unwrap();
    let panel = load_counts(&counts, Some(&exposure)).unwrap();
    assert_eq!(panel.exposure(), Some(&[0.5, 2.5][..]));

    let copy = dir.path().join("copy.csv");
    save_exposure(&panel, &copy).unwrap();
    assert_eq!(load_counts(&counts, Some(&copy)).unwrap(), panel);

    fs::write(&exposure, "series_id,exposure\na,0.5\n").unwrap();
    assert!(load_counts(&counts, Some(&exposure)).is_err());
    fs::write(&exposure, "series_id,exposure\na,0.5\nb,2\nc,1\n").unwrap();
    assert!(load_counts(&counts, Some(&exposure)).is_err());
    fs::write(&exposure, "series_id,exposure\na,0\nb,2\n").unwrap();
    assert!(load_counts(&counts, Some(&exposure)).is_err());
}

fn fitted_draws(n_chains: usize, keep_innovations: bool) -> (dpoinar_core::CountPanel, PosteriorDraws) {
    let sim = scenario_by_name("easy-0.5").unwrap().with_series(8).simulate(11).unwrap();
    let config = SamplerConfig {
        n_iterations: 60,
        burn_in: 10,
        thin: 5,
        n_chains,
        seed: 5,
        keep_innovations,
        ..SamplerConfig::default()
    };
    let draws = PosteriorDraws::merge(run_chains_parallel(&sim.panel, &config).unwrap());
    (sim.panel, draws)
}

#[test]
fn draws_round_trip_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("draws.jsonl");
    for keep in [false, true] {
        let (panel, draws) = fitted_draws(1, keep);
        assert_eq!(draws.len(), 10);
        let header = DrawsHeader::new(&draws, RateMode::Plain, panel.series_ids());
        save_draws(&path, &header, &draws).unwrap();
        let (h, back) = load_draws(&path).unwrap();
        assert_eq!(h, header);
        assert_eq!(h.innovations, keep);
        assert_eq!(back, draws);
        for (a, b) in back.iter().zip(draws.iter()) {
            for (x, y) in a.state.alpha.iter().zip(&b.state.alpha) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
            assert_eq!(a.state.tau.to_bits(), b.state.tau.to_bits());
        }
    }
}

#[test]
fn two_chains_keep_their_indices() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("draws.jsonl");
    let (panel, draws) = fitted_draws(2, false);
    let header = DrawsHeader::new(&draws, RateMode::Plain, panel.series_ids());
    assert_eq!(header.chains, [0, 1]);
    save_draws(&path, &header, &draws).unwrap();
    let (_, back) = load_draws(&path).unwrap();
    assert_eq!(back.chain_ids(), [0, 1]);
    let per_chain: Vec<usize> = [0, 1]
        .iter()
        .map(|c| back.iter().filter(|d| d.chain == *c).count())
        .collect();
    assert_eq!(per_chain, [10, 10]);
}

#[test]
fn truncated_file_fails_integrity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("draws.jsonl");
    let (panel, draws) = fitted_draws(1, false);
    save_draws(&path, &DrawsHeader::new(&draws, RateMode::Plain, panel.series_ids()), &draws).unwrap();
    let text = fs::read_to_string(&path).unwrap();

    // Cut in the middle of a record.
    fs::write(&path, &text[..text.len() * 2 / 3]).unwrap();
    assert!(matches!(load_draws(&path), Err(Error::Integrity { .. })));

    // Cut on a line boundary: fewer records than announced.
    let lines: Vec<&str> = text.lines().collect();
    fs::write(&path, lines[..lines.len() - 2].join("\n")).unwrap();
    assert!(matches!(load_draws(&path), Err(Error::Integrity { .. })));

    fs::write(&path, "").unwrap();
    assert!(matches!(load_draws(&path), Err(Error::Integrity { .. })));
}

#[test]
fn version_mismatch_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("draws.jsonl");
    let (panel, draws) = fitted_draws(1, false);
    let mut header = DrawsHeader::new(&draws, RateMode::Plain, panel.series_ids());
    header.version = DRAWS_VERSION + 1;
    save_draws(&path, &header, &draws).unwrap();
    match load_draws(&path) {
        Err(Error::Version { found, expected, .. }) => {
            assert_eq!((found, expected), (DRAWS_VERSION + 1, DRAWS_VERSION));
        }
        other => panic!("expected a version error, got {other:?}"),
    }
}
