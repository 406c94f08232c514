fn main() {
    // placeholder while the library comes up; the real CLI follows
    eprintln!("dga: not yet wired");
    std::process::exit(2);
}
