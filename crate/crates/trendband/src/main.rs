fn main() {
    std::process::exit(trendband::cli::run(std::env::args_os()));
}
