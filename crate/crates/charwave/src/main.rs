fn main() {
    println!("charwave: CLI wiring pending");
}
