/// Lowercases, splits on non-alphanumeric characters, and drops pure digit
/// runs and tokens shorter than two characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2 && !t.chars().all(|c| c.is_numeric()))
        .map(str::to_lowercase)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(tokenize("Drive, DRIVE drive!"), vec!["drive"; 3]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("IDE-drive 486"), vec!["ide", "drive"]);
        assert_eq!(tokenize("a b2 x 42 486dx"), vec!["b2", "486dx"]);
        assert_eq!(tokenize("Größe café"), vec!["größe", "café"]);
    }
}
