fn main() {
    std::process::exit(qda::run(std::env::args_os()));
}
