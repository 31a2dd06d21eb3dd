fn main() {
    std::process::exit(prodone::run(std::env::args_os()));
}
