#![no_main]

use libfuzzer_sys::fuzz_target;
use noon_lab::{ConfigFile, Scenario, ScenarioConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(file) = ConfigFile::from_json(text) else {
        return;
    };
    for scenario in Scenario::ALL {
        if let Ok(config) = ScenarioConfig::resolve(scenario, file.clone()) {
            let grid = config.phase_grid();
            assert_eq!(grid.len(), config.steps);
            assert_eq!(grid[0], config.phi_min);
            assert_eq!(grid[grid.len() - 1], config.phi_max);
        }
    }
});
