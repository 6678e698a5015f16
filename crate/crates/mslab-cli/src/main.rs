fn main() {
    println!("mslab");
}
