//! The command-line pipeline driven from code: parse a TOML configuration,
//! execute it and write the result files.
//!
//! `cargo run --example config_run`

use subsim::config::parse_config;
use subsim::output::emit_results;
use subsim::runner::execute;

const CONFIG: &str = r#"
command = "estimate"
seed = 0
replicates = 4
method = "both"
p_target = 1e-5

[model]
name = "linear_sum"
dim = 20

[ss]
level_probability = 0.1
samples_per_level = 500
"#;

pub fn run_example() -> subsim::Result<Vec<std::path::PathBuf>> {
    let config = parse_config(CONFIG)?;
    let output = execute(&config)?;
    let dir = std::env::temp_dir().join("subsim_config_run");
    let files = emit_results(&output, &config, 0.0, &dir)?;
    for f in &files {
        println!("wrote {}", f.display());
    }
    Ok(files)
}

fn main() -> subsim::Result<()> {
    run_example().map(|_| ())
}
