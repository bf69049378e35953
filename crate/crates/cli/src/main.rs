fn main() {
    std::process::exit(rotcost_cli::run(std::env::args_os()));
}
