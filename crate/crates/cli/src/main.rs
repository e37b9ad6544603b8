fn main() {
    std::process::exit(cpt_cli::run(std::env::args_os()));
}
