use std::process::exit;

fn main() {
    exit(wienerlab::cli::main_entry());
}
