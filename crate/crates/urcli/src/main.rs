fn main() {
    std::process::exit(urcli::run());
}
