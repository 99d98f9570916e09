//! A small probabilistic grammar of English-like sentences and a rule-based
//! learner-error model, used for desk-scale experiments.
//!
//! Sentences carry subject-verb agreement, `a`/`an` selection and verb
//! collocations. The error model injects word drops, substitutions,
//! inflection swaps and misspellings at per-site rates. Some rates exceed one
//! half, so even argmax decoding of a well-trained corruptor emits errors.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::corpus::{ParallelPair, Sentence};
use crate::rng::Rng64;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Number {
    Singular,
    Plural,
}

const NOUNS: &[(&str, &str)] = &[
    ("cat", "cats"),
    ("dog", "dogs"),
    ("teacher", "teachers"),
    ("student", "students"),
    ("apple", "apples"),
    ("idea", "ideas"),
    ("child", "children"),
    ("box", "boxes"),
    ("city", "cities"),
    ("elephant", "elephants"),
    ("house", "houses"),
    ("friend", "friends"),
    ("book", "books"),
    ("orange", "oranges"),
    ("umbrella", "umbrellas"),
    ("man", "men"),
];

const ADJECTIVES: &[&str] = &[
    "big",
    "small",
    "old",
    "red",
    "happy",
    "interesting",
    "new",
    "quiet",
    "angry",
    "early",
];

const TRANSITIVE: &[(&str, &str)] = &[
    ("sees", "see"),
    ("likes", "like"),
    ("wants", "want"),
    ("finds", "find"),
    ("has", "have"),
    ("carries", "carry"),
    ("watches", "watch"),
    ("buys", "buy"),
    ("takes", "take"),
];

const INTRANSITIVE: &[(&str, &str)] = &[
    ("sleeps", "sleep"),
    ("runs", "run"),
    ("laughs", "laugh"),
    ("waits", "wait"),
    ("arrives", "arrive"),
];

/// (singular, plural, preposition, typical wrong preposition)
const COLLOCATIONS: &[(&str, &str, &str, &str)] = &[
    ("listens", "listen", "to", "at"),
    ("looks", "look", "at", "to"),
    ("depends", "depend", "on", "of"),
    ("thinks", "think", "about", "on"),
    ("belongs", "belong", "to", "at"),
    ("waits", "wait", "for", "on"),
];

const LOCATIVES: &[&str] = &["in", "on", "near", "with", "under"];

const MISSPELLINGS: &[(&str, &str, f64)] = &[
    ("interesting", "intresting", 0.3),
    ("umbrella", "umbrela", 0.3),
    ("carries", "carrys", 0.55),
    ("watches", "watchs", 0.3),
    ("cities", "citys", 0.3),
    ("boxes", "boxs", 0.3),
    ("children", "childs", 0.3),
    ("arrives", "arives", 0.2),
];

fn starts_with_vowel(word: &str) -> bool {
    matches!(word.chars().next(), Some('a' | 'e' | 'i' | 'o' | 'u'))
}

/// Word category of a generated token, which determines the error sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Determiner,
    Adjective,
    Noun(usize),
    Verb,
    CollocationPrep(usize),
    Locative,
    Punct,
}

struct Builder<'r> {
    rng: &'r mut Rng64,
    words: Vec<(String, Role)>,
}

impl Builder<'_> {
    fn push(&mut self, word: &str, role: Role) {
        self.words.push((word.to_string(), role));
    }

    fn noun_phrase(&mut self) {
        let number = if self.rng.random_bool(0.5) {
            Number::Singular
        } else {
            Number::Plural
        };
        self.noun_phrase_with(number);
    }

    fn noun_phrase_with(&mut self, number: Number) {
        let noun_idx = self.rng.random_range(0..NOUNS.len());
        let noun = match number {
            Number::Singular => NOUNS[noun_idx].0,
            Number::Plural => NOUNS[noun_idx].1,
        };
        let adjective = self.rng.random_bool(0.4).then(|| *ADJECTIVES.choose(self.rng).unwrap());
        let next = adjective.unwrap_or(noun);
        let det = match number {
            Number::Singular => match self.rng.random_range(0..10) {
                0..=4 => "the",
                5..=7 if starts_with_vowel(next) => "an",
                5..=7 => "a",
                8 => "this",
                _ => "every",
            },
            Number::Plural => *["the", "the", "these", "some", "many"].choose(self.rng).unwrap(),
        };
        self.push(det, Role::Determiner);
        if let Some(adj) = adjective {
            self.push(adj, Role::Adjective);
        }
        self.push(noun, Role::Noun(noun_idx));
    }

    fn verb_form(&self, forms: (&str, &str), number: Number) -> String {
        match number {
            Number::Singular => forms.0.to_string(),
            Number::Plural => forms.1.to_string(),
        }
    }

    fn sentence(mut self) -> Vec<(String, Role)> {
        let number = if self.rng.random_bool(0.5) {
            Number::Singular
        } else {
            Number::Plural
        };
        self.noun_phrase_with(number);
        match self.rng.random_range(0..10) {
            0..=4 => {
                let v = *TRANSITIVE.choose(self.rng).unwrap();
                let w = self.verb_form(v, number);
                self.push(&w, Role::Verb);
                self.noun_phrase();
            }
            5..=6 => {
                let v = *INTRANSITIVE.choose(self.rng).unwrap();
                let w = self.verb_form(v, number);
                self.push(&w, Role::Verb);
            }
            _ => {
                let k = self.rng.random_range(0..COLLOCATIONS.len());
                let (sg, pl, prep, _) = COLLOCATIONS[k];
                let w = self.verb_form((sg, pl), number);
                self.push(&w, Role::Verb);
                self.push(prep, Role::CollocationPrep(k));
                self.noun_phrase();
            }
        }
        if self.rng.random_bool(0.3) {
            let loc = *LOCATIVES.choose(self.rng).unwrap();
            self.push(loc, Role::Locative);
            self.noun_phrase();
        }
        self.push(".", Role::Punct);
        self.words
    }
}

/// Per-site probabilities of the learner-error model.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorModel {
    pub agreement: f64,
    pub noun_number: f64,
    pub an_to_a: f64,
    pub a_to_an: f64,
    pub collocation: f64,
    pub drop_the: f64,
    pub locative_swap: f64,
    /// Multiplier on the per-word misspelling rates.
    pub spelling_scale: f64,
}

impl Default for ErrorModel {
    fn default() -> Self {
        ErrorModel {
            agreement: 0.25,
            noun_number: 0.08,
            an_to_a: 0.6,
            a_to_an: 0.05,
            collocation: 0.35,
            drop_the: 0.08,
            locative_swap: 0.1,
            spelling_scale: 1.0,
        }
    }
}

fn swap_form(word: &str, table: &'static [(&'static str, &'static str)]) -> Option<&'static str> {
    table.iter().find_map(|&(sg, pl)| {
        if word == sg {
            Some(pl)
        } else if word == pl {
            Some(sg)
        } else {
            None
        }
    })
}

/// The clean sentence generator plus its error model.
#[derive(Debug, Clone, Default)]
pub struct ToyLanguage {
    pub errors: ErrorModel,
}

impl ToyLanguage {
    fn generate_with_roles(&self, rng: &mut Rng64) -> Vec<(String, Role)> {
        Builder { rng, words: Vec::new() }.sentence()
    }

    /// One grammatical sentence.
    pub fn generate(&self, rng: &mut Rng64) -> Sentence {
        let words = self.generate_with_roles(rng).into_iter().map(|(w, _)| w).collect();
        Sentence::new(words).expect("grammar emits non-empty sentences")
    }

    /// A grammatical sentence and a learner version of it (possibly identical).
    pub fn generate_pair(&self, rng: &mut Rng64) -> ParallelPair {
        let words = self.generate_with_roles(rng);
        let clean = Sentence::new(words.iter().map(|(w, _)| w.clone()).collect()).unwrap();
        let noisy = self.corrupt(&words, rng);
        ParallelPair::new(clean, noisy)
    }

    fn corrupt(&self, words: &[(String, Role)], rng: &mut Rng64) -> Sentence {
        let e = &self.errors;
        let mut out: Vec<String> = Vec::with_capacity(words.len());
        for (word, role) in words {
            let w = word.as_str();
            let replaced: Option<String> = match role {
                Role::Determiner if w == "the" && rng.random_bool(e.drop_the) => {
                    continue;
                }
                Role::Determiner if w == "an" && rng.random_bool(e.an_to_a) => Some("a".into()),
                Role::Determiner if w == "a" && rng.random_bool(e.a_to_an) => Some("an".into()),
                Role::Verb if rng.random_bool(e.agreement) => swap_form(w, TRANSITIVE)
                    .or_else(|| swap_form(w, INTRANSITIVE))
                    .or_else(|| {
                        COLLOCATIONS
                            .iter()
                            .find_map(|c| (w == c.0).then_some(c.1).or_else(|| (w == c.1).then_some(c.0)))
                    })
                    .map(String::from),
                Role::Noun(k) if rng.random_bool(e.noun_number) => {
                    let (sg, pl) = NOUNS[*k];
                    Some(if w == sg { pl } else { sg }.to_string())
                }
                Role::CollocationPrep(k) if rng.random_bool(e.collocation) => Some(COLLOCATIONS[*k].3.to_string()),
                Role::Locative if rng.random_bool(e.locative_swap) => {
                    let others: Vec<&&str> = LOCATIVES.iter().filter(|&&l| l != w).collect();
                    Some(others.choose(rng).unwrap().to_string())
                }
                _ => None,
            };
            let mut token = replaced.unwrap_or_else(|| w.to_string());
            if let Some(&(_, wrong, p)) = MISSPELLINGS.iter().find(|(right, _, _)| *right == token) {
                if rng.random_bool((p * e.spelling_scale).min(1.0)) {
                    token = wrong.to_string();
                }
            }
            out.push(token);
        }
        Sentence::new(out).expect("corruption keeps the final period")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn sentences_are_well_formed() {
        let lang = ToyLanguage::default();
        let mut rng = seeded(1);
        for _ in 0..200 {
            let s = lang.generate(&mut rng);
            assert_eq!(s.tokens().last().unwrap(), ".");
            assert!(s.len() >= 4);
            for w in s.tokens().windows(2) {
                if w[0] == "an" {
                    assert!(starts_with_vowel(&w[1]), "{s}");
                }
                if w[0] == "a" {
                    assert!(!starts_with_vowel(&w[1]), "{s}");
                }
            }
        }
    }

    #[test]
    fn error_model_injects_some_errors_but_not_everywhere() {
        let lang = ToyLanguage::default();
        let mut rng = seeded(2);
        let pairs: Vec<_> = (0..500).map(|_| lang.generate_pair(&mut rng)).collect();
        let changed = pairs.iter().filter(|p| p.source != p.target).count();
        assert!(changed > 150 && changed < 450, "{changed}");
    }

    #[test]
    fn agreement_swap_flips_number() {
        assert_eq!(swap_form("sees", TRANSITIVE), Some("see"));
        assert_eq!(swap_form("sleep", INTRANSITIVE), Some("sleeps"));
        assert_eq!(swap_form("zzz", TRANSITIVE), None);
    }

    #[test]
    fn generation_is_seeded() {
        let lang = ToyLanguage::default();
        let a: Vec<_> = {
            let mut r = seeded(3);
            (0..20).map(|_| lang.generate_pair(&mut r)).collect()
        };
        let b: Vec<_> = {
            let mut r = seeded(3);
            (0..20).map(|_| lang.generate_pair(&mut r)).collect()
        };
        assert_eq!(a, b);
    }
}
