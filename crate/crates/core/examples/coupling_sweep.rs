//! A coupling sweep through the configuration layer, as the `sweep`
//! subcommand runs it: the hidden state keeps its localization length while
//! its emitter weight falls.

use nhemitter::cli_io::config::parse_config_str;
use nhemitter::cli_io::sweep::run_sweep;

const CONFIG: &str = r#"{
    "bath": "unidirectional", "kappa": 1, "length": 400,
    "emitter": {"delta0": 0.3, "gamma": 1.0, "g": 1.0, "x0": 200},
    "sweep": {"task": "bound-states", "params": [{"name": "g", "start": 0.1, "stop": 3.0, "points": 30}]}
}"#;

fn main() -> nhemitter::Result<()> {
    let cfg = parse_config_str(CONFIG, "inline", &[])?;
    let (table, ok) = run_sweep(&cfg, 4)?;
    println!("{ok} of {} points succeeded", table.rows.len());
    let cols: Vec<usize> = ["g", "inside_emitter_weight", "inside_xi", "outside_emitter_weight"]
        .iter()
        .map(|name| table.column(name).expect("sweep column"))
        .collect();
    println!("{:>24} {:>24} {:>24} {:>24}", "g", "hidden |c_e|^2", "hidden xi", "outside |c_e|^2");
    for row in &table.rows {
        let line: Vec<String> = cols.iter().map(|&c| format!("{:>24}", row[c].render())).collect();
        println!("{}", line.join(" "));
    }
    Ok(())
}
