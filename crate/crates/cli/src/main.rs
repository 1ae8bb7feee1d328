fn main() {
    std::process::exit(parroteval::run(std::env::args_os()));
}
