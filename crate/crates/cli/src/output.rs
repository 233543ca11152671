use std::io::{self, Write};

/// Prose or `key<TAB>value` output on stdout.
pub struct Output {
    porcelain: bool,
    color: bool,
}

impl Output {
    pub fn new(porcelain: bool) -> Self {
        let color = !porcelain && std::env::var("FAIRCHECK_COLOR").is_ok_and(|v| v == "1");
        Output { porcelain, color }
    }

    pub fn porcelain(&self) -> bool {
        self.porcelain
    }

    fn line(&self, text: &str) {
        let mut stdout = io::stdout().lock();
        // A closed pipe is not worth a panic.
        let _ = writeln!(stdout, "{text}");
    }

    /// A labelled value: `key: value`, or `key<TAB>value` in porcelain mode.
    pub fn field(&self, key: &str, value: impl std::fmt::Display) {
        let value = value.to_string();
        if self.porcelain {
            self.line(&format!("{}\t{}", key.replace(' ', "_"), value.replace('\n', " / ")));
        } else {
            self.line(&format!("{key}: {value}"));
        }
    }

    /// Free text, dropped in porcelain mode.
    pub fn text(&self, text: impl std::fmt::Display) {
        if !self.porcelain {
            self.line(&text.to_string());
        }
    }

    /// The headline verdict, green when good and red otherwise.
    pub fn verdict(&self, word: &str, good: bool) {
        if self.porcelain {
            self.line(&format!("verdict\t{word}"));
        } else if self.color {
            let code = if good { 32 } else { 31 };
            self.line(&format!("\x1b[1;{code}m{word}\x1b[0m"));
        } else {
            self.line(word);
        }
    }
}
