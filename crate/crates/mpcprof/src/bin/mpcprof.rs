fn main() {
    std::process::exit(mpcprof::cli::main_entry());
}
