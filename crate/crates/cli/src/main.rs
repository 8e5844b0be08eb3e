fn main() {
    std::process::exit(dnnd_cli::run(std::env::args_os()));
}
