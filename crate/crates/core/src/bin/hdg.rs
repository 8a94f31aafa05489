fn main() {
    std::process::exit(dbc_hdg::cli::run(std::env::args_os()));
}
