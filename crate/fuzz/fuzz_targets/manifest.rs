#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use metric_lab_cli::{read_manifest, spec_to_argv, Cli, ExperimentSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(m) = read_manifest(s) {
        for e in m.experiments {
            if let Some(spec) = e.inline {
                check_spec(&spec);
            }
        }
    }
    if let Ok(spec) = serde_json::from_str::<ExperimentSpec>(s) {
        check_spec(&spec);
    }
});

fn check_spec(spec: &ExperimentSpec) {
    use clap::Parser;
    if let Ok(argv) = spec_to_argv(spec, Path::new("base")) {
        let _ = Cli::try_parse_from(argv);
    }
}
