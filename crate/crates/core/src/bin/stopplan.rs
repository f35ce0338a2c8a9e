fn main() {
    std::process::exit(stopplan::cli::cli_main());
}
