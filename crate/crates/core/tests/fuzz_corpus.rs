//! Replays the checked-in fuzz corpus through the parsers.

use std::fs;
use std::path::PathBuf;

use hill_libration::io::{
    parse_config, parse_family_kind, parse_ic_argument, parse_ic_document, parse_inline_state,
    parse_orbit_record,
};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn inline_state_seeds() {
    for (name, text) in seeds("parse_inline_state") {
        let ok = parse_inline_state(&text).is_ok();
        assert_eq!(ok, !matches!(name.as_str(), "short" | "nan"), "{name}");
    }
}

#[test]
fn ic_document_seeds() {
    for (name, text) in seeds("parse_ic_document") {
        let ok = parse_ic_document(&text).is_ok();
        assert_eq!(ok, name != "malformed.json", "{name}");
        assert_eq!(parse_ic_argument(&text).is_ok(), ok);
    }
}

#[test]
fn orbit_record_seeds() {
    for (name, text) in seeds("parse_orbit_record") {
        let rec = parse_orbit_record(&text);
        match name.as_str() {
            "zero_period.json" => assert!(rec.is_err()),
            "corrected_vertical.json" => assert!(rec.unwrap().to_periodic().is_some()),
            _ => assert!(rec.is_ok(), "{name}"),
        }
    }
}

#[test]
fn config_seeds() {
    for (name, text) in seeds("parse_config") {
        let ok = parse_config(&text).is_ok();
        assert_eq!(ok, !matches!(name.as_str(), "duplicate.cfg" | "no_equals.cfg"), "{name}");
    }
}

#[test]
fn family_kind_seeds() {
    for (name, text) in seeds("parse_family_kind") {
        assert!(parse_family_kind(&text).is_ok(), "{name}");
    }
}
