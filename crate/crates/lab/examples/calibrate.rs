//! Refits the frozen constants and prints the calibration file.

fn main() {
    match extlab::Calibration::frozen().refit() {
        Ok(c) => print!("{}", c.to_toml()),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
