// Run the quick property suite and print its summary table.

use coopspread::verify::{suite_run, summary_table, PropertyResult};

pub fn run_example() -> Result<Vec<PropertyResult>, Box<dyn std::error::Error>> {
    let results = suite_run("smoke")?;
    print!("{}", summary_table(&results));
    Ok(results)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example().map(|_| ())
}
