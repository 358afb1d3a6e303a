/// Words whose trailing period does not end a sentence.
const ABBREVIATIONS: &[&str] = &[
    "mr.", "mrs.", "ms.", "dr.", "prof.", "sr.", "jr.", "st.", "vs.", "e.g.", "i.e.", "cf.",
    "approx.", "dept.", "inc.", "ltd.", "co.", "corp.", "gen.", "gov.", "sen.", "rep.", "no.",
    "fig.", "jan.", "feb.", "mar.", "apr.", "jun.", "jul.", "aug.", "sep.", "sept.", "oct.",
    "nov.", "dec.", "u.s.", "u.k.", "a.m.", "p.m.",
];

const CLITICS: &[&str] = &["n't", "'s", "'re", "'ve", "'ll", "'d", "'m"];

const EMOTICONS: &[&str] = &[
    ":-)", ":-(", ":)", ":(", ";)", ";-)", ":D", ":-D", ":P", ":-P", ":p", ":'(", "<3", ":/",
    ":-/", "xD", "XD", ":o", ":O",
];

fn is_pictograph(c: char) -> bool {
    matches!(c as u32,
        0x1F000..=0x1FAFF   // emoji, pictographs, transport, flags
        | 0x2600..=0x27BF   // misc symbols, dingbats
        | 0x2B00..=0x2BFF   // arrows and stars
        | 0xFE00..=0xFE0F   // variation selectors
        | 0x200D            // zero width joiner
        | 0xE0020..=0xE007F // tag characters
    )
}

/// Drops emoji, pictographs and common ASCII emoticons, then collapses runs
/// of whitespace into single spaces.
pub fn clean_text(text: &str) -> String {
    let words = text.split_whitespace().filter_map(|w| {
        if EMOTICONS.contains(&w) {
            return None;
        }
        let kept: String = w.chars().filter(|&c| !is_pictograph(c)).collect();
        (!kept.is_empty()).then_some(kept)
    });
    words.collect::<Vec<_>>().join(" ")
}

/// Splits on `.`, `!` or `?` followed by whitespace or end of input. A period
/// closing a known abbreviation or a single-letter initial does not split.
/// Sentences are returned trimmed; only the whitespace between them is lost.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut start = 0;
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    for (k, &(pos, c)) in chars.iter().enumerate() {
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        let next = chars.get(k + 1).map(|&(_, n)| n);
        if next.is_some_and(|n| !n.is_whitespace()) {
            continue;
        }
        let end = pos + c.len_utf8();
        if c == '.' && is_abbreviation(&text[start..end]) {
            continue;
        }
        let piece = text[start..end].trim();
        if !piece.is_empty() {
            out.push(piece.to_string());
        }
        start = end;
    }
    let tail = text[start..].trim();
    if !tail.is_empty() {
        out.push(tail.to_string());
    }
    out
}

fn is_abbreviation(prefix: &str) -> bool {
    let word = prefix.split_whitespace().last().unwrap_or("");
    let word = word.trim_start_matches(|c: char| !c.is_alphanumeric());
    let lower = word.to_lowercase();
    if ABBREVIATIONS.contains(&lower.as_str()) {
        return true;
    }
    // single initial such as "J."
    let mut cs = word.chars();
    matches!((cs.next(), cs.next(), cs.next()), (Some(a), Some('.'), None) if a.is_uppercase())
}

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation() || matches!(c, '“' | '”' | '‘' | '’' | '…' | '–' | '—')
}

/// Whitespace tokenization with leading and trailing punctuation detached.
/// Repeated punctuation (`...`, `!!`) stays one token; English clitics are
/// split off (`it's` -> `it`, `'s`).
pub fn tokenize(sentence: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in sentence.split_whitespace() {
        if ABBREVIATIONS.contains(&chunk.to_lowercase().as_str()) {
            out.push(chunk.to_string());
            continue;
        }
        let chars: Vec<char> = chunk.chars().collect();
        let mut lo = 0;
        let mut hi = chars.len();
        let mut leading = Vec::new();
        while lo < hi && is_punct(chars[lo]) && !is_clitic_start(&chars[lo..hi]) {
            let run = run_len(&chars[lo..hi]);
            leading.push(chars[lo..lo + run].iter().collect::<String>());
            lo += run;
        }
        let mut trailing = Vec::new();
        while hi > lo && is_punct(chars[hi - 1]) {
            let mut run = 1;
            while hi - run > lo && chars[hi - run - 1] == chars[hi - 1] {
                run += 1;
            }
            trailing.push(chars[hi - run..hi].iter().collect::<String>());
            hi -= run;
        }
        out.extend(leading);
        let core: String = chars[lo..hi].iter().collect();
        if !core.is_empty() {
            out.extend(split_clitic(&core));
        }
        out.extend(trailing.into_iter().rev());
    }
    out
}

fn run_len(chars: &[char]) -> usize {
    chars.iter().take_while(|&&c| c == chars[0]).count()
}

fn is_clitic_start(chars: &[char]) -> bool {
    let s: String = chars.iter().collect::<String>().to_lowercase();
    CLITICS.iter().any(|c| s == *c)
}

fn split_clitic(word: &str) -> Vec<String> {
    let lower = word.to_lowercase();
    for clitic in CLITICS {
        if lower.len() > clitic.len() && lower.ends_with(clitic) {
            let cut = word.len() - clitic.len();
            if word.is_char_boundary(cut) {
                return vec![word[..cut].to_string(), word[cut..].to_string()];
            }
        }
    }
    vec![word.to_string()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_terminators() {
        assert_eq!(split_sentences("Hi there. Bye!"), ["Hi there.", "Bye!"]);
    }

    #[test]
    fn empty_text() {
        assert!(split_sentences("").is_empty());
        assert!(split_sentences("   ").is_empty());
    }

    #[test]
    fn abbreviation_guard() {
        assert_eq!(split_sentences("Mr. Smith left."), ["Mr. Smith left."]);
        assert_eq!(
            split_sentences("See e.g. this one. And J. Doe too?"),
            ["See e.g. this one.", "And J. Doe too?"]
        );
    }

    #[test]
    fn decimals_do_not_split() {
        assert_eq!(
            split_sentences("It costs 3.50 now. Ok"),
            ["It costs 3.50 now.", "Ok"]
        );
    }

    #[test]
    fn no_characters_lost() {
        let text = "One.  Two!\nThree? four... five";
        let joined: String = split_sentences(text).concat();
        let strip = |s: &str| s.chars().filter(|c| !c.is_whitespace()).collect::<String>();
        assert_eq!(strip(&joined), strip(text));
    }

    #[test]
    fn basic_tokens() {
        assert_eq!(tokenize("Dogs bark."), ["Dogs", "bark", "."]);
        assert_eq!(tokenize("it's"), ["it", "'s"]);
        assert_eq!(tokenize("don't"), ["do", "n't"]);
        assert!(tokenize("  ").is_empty());
    }

    #[test]
    fn punctuation_runs() {
        assert_eq!(tokenize("(wait...)"), ["(", "wait", "...", ")"]);
        assert_eq!(tokenize("\"Hi!\""), ["\"", "Hi", "!", "\""]);
        assert_eq!(tokenize("Mr. X"), ["Mr.", "X"]);
    }

    #[test]
    fn cleaning() {
        assert_eq!(
            clean_text("great  job 🎉 :)  see\tyou"),
            "great job see you"
        );
        assert_eq!(clean_text("👍"), "");
    }
}
