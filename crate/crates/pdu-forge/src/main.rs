fn main() {
    std::process::exit(pdu_forge::cli::run());
}
