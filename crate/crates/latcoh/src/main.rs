fn main() {
    std::process::exit(latcoh::cli::main_entry());
}
