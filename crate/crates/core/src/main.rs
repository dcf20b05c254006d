fn main() {
    std::process::exit(botscope::cli::run(std::env::args_os()));
}
