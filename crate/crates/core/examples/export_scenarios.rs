//! Writes every built-in scenario to `<dir>/<name>.json` (default `scenarios`).

use std::path::PathBuf;

use hgame::scenario::{library, ScenarioFile};

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "scenarios".into()));
    std::fs::create_dir_all(&dir)?;
    for s in library::all() {
        let path = dir.join(format!("{}.json", s.name));
        std::fs::write(&path, ScenarioFile::from_scenario(&s).to_json())?;
        println!("{}", path.display());
    }
    Ok(())
}
