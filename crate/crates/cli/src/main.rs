fn main() {
    std::process::exit(firesig_cli::main_with(std::env::args_os()));
}
