fn main() {
    std::process::exit(toric_obstruct_cli::run(std::env::args_os()));
}
