//! ECMA-262 pattern syntax, without flags, back-references or lookaround.

use super::{complement_ranges, normalize_ranges, CharClass, Pattern, PatternError};

const MAX_REPEAT: u32 = 1000;

pub fn parse_pattern(src: &str) -> Result<Pattern, PatternError> {
    let mut p = Parser {
        chars: src.chars().collect(),
        pos: 0,
        src,
    };
    let pat = p.disjunction()?;
    if p.pos < p.chars.len() {
        return Err(p.syntax("unmatched ')'"));
    }
    Ok(pat)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

fn digit_ranges() -> Vec<(u32, u32)> {
    vec![('0' as u32, '9' as u32)]
}

fn word_ranges() -> Vec<(u32, u32)> {
    vec![
        ('0' as u32, '9' as u32),
        ('A' as u32, 'Z' as u32),
        ('_' as u32, '_' as u32),
        ('a' as u32, 'z' as u32),
    ]
}

/// WhiteSpace and LineTerminator code points.
fn space_ranges() -> Vec<(u32, u32)> {
    normalize_ranges(vec![
        (0x09, 0x0D),
        (0x20, 0x20),
        (0xA0, 0xA0),
        (0x1680, 0x1680),
        (0x2000, 0x200A),
        (0x2028, 0x2029),
        (0x202F, 0x202F),
        (0x205F, 0x205F),
        (0x3000, 0x3000),
        (0xFEFF, 0xFEFF),
    ])
}

enum ClassAtom {
    Char(u32),
    Set(Vec<(u32, u32)>),
}

impl Parser<'_> {
    fn syntax(&self, message: &str) -> PatternError {
        PatternError::Syntax {
            pattern: self.src.to_string(),
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn unsupported(&self, feature: &str) -> PatternError {
        PatternError::Unsupported {
            pattern: self.src.to_string(),
            feature: feature.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn disjunction(&mut self) -> Result<Pattern, PatternError> {
        let mut alts = vec![self.alternative()?];
        while self.eat('|') {
            alts.push(self.alternative()?);
        }
        Ok(Pattern::union(alts))
    }

    fn alternative(&mut self) -> Result<Pattern, PatternError> {
        let mut items = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            let atom = match c {
                '^' => {
                    self.pos += 1;
                    items.push(Pattern::AnchorStart);
                    continue;
                }
                '$' => {
                    self.pos += 1;
                    items.push(Pattern::AnchorEnd);
                    continue;
                }
                '*' | '+' | '?' => return Err(self.syntax("nothing to repeat")),
                '{' if self.quantifier_ahead() => return Err(self.syntax("nothing to repeat")),
                _ => self.atom()?,
            };
            let atom = self.quantified(atom)?;
            items.push(atom);
        }
        Ok(Pattern::concat(items))
    }

    fn quantifier_ahead(&self) -> bool {
        let mut i = self.pos + 1;
        let mut saw_digit = false;
        while let Some(c) = self.chars.get(i) {
            match c {
                '0'..='9' => saw_digit = true,
                ',' if saw_digit => {}
                '}' => return saw_digit,
                _ => return false,
            }
            i += 1;
        }
        false
    }

    fn number(&mut self) -> Result<u32, PatternError> {
        let start = self.pos;
        while let Some('0'..='9') = self.peek() {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.syntax("repetition count too large"))
    }

    fn quantified(&mut self, atom: Pattern) -> Result<Pattern, PatternError> {
        let q = match self.peek() {
            Some('*') => {
                self.pos += 1;
                Pattern::Star(Box::new(atom))
            }
            Some('+') => {
                self.pos += 1;
                Pattern::Plus(Box::new(atom))
            }
            Some('?') => {
                self.pos += 1;
                Pattern::Opt(Box::new(atom))
            }
            Some('{') if self.quantifier_ahead() => {
                self.pos += 1;
                let lo = self.number()?;
                let hi = if self.eat(',') {
                    if self.peek() == Some('}') {
                        None
                    } else {
                        Some(self.number()?)
                    }
                } else {
                    Some(lo)
                };
                if !self.eat('}') {
                    return Err(self.syntax("malformed quantifier"));
                }
                if let Some(h) = hi {
                    if h < lo {
                        return Err(self.syntax("numbers out of order in quantifier"));
                    }
                }
                if lo > MAX_REPEAT || hi.is_some_and(|h| h > MAX_REPEAT) {
                    return Err(PatternError::LimitExceeded(format!(
                        "repetition bound above {MAX_REPEAT}"
                    )));
                }
                Pattern::Repeat(Box::new(atom), lo, hi)
            }
            _ => return Ok(atom),
        };
        // Lazy quantifiers match the same language.
        self.eat('?');
        if matches!(self.peek(), Some('*' | '+' | '?')) || (self.peek() == Some('{') && self.quantifier_ahead()) {
            return Err(self.syntax("nothing to repeat"));
        }
        Ok(q)
    }

    fn atom(&mut self) -> Result<Pattern, PatternError> {
        let c = self.peek().ok_or_else(|| self.syntax("unexpected end"))?;
        self.pos += 1;
        match c {
            '.' => Ok(Pattern::Class(CharClass::dot())),
            '(' => {
                if self.eat('?') {
                    match self.peek() {
                        Some(':') => {
                            self.pos += 1;
                        }
                        Some('=') | Some('!') => return Err(self.unsupported("lookahead")),
                        Some('<') if matches!(self.peek_at(1), Some('=') | Some('!')) => {
                            return Err(self.unsupported("lookbehind"))
                        }
                        Some('<') => {
                            self.pos += 1;
                            while let Some(c) = self.peek() {
                                self.pos += 1;
                                if c == '>' {
                                    break;
                                }
                            }
                        }
                        _ => return Err(self.syntax("invalid group")),
                    }
                }
                let inner = self.disjunction()?;
                if !self.eat(')') {
                    return Err(self.syntax("unterminated group"));
                }
                Ok(inner)
            }
            ')' => Err(self.syntax("unmatched ')'")),
            '[' => self.class(),
            '\\' => self.atom_escape(),
            c => Ok(Pattern::Char(c)),
        }
    }

    fn hex(&mut self, n: usize) -> Option<u32> {
        let s: String = self.chars.get(self.pos..self.pos + n)?.iter().collect();
        let v = u32::from_str_radix(&s, 16).ok()?;
        if s.chars().all(|c| c.is_ascii_hexdigit()) {
            self.pos += n;
            Some(v)
        } else {
            None
        }
    }

    /// `\u` escapes: `\uXXXX`, surrogate pairs, and `\u{…}`.
    fn unicode_escape(&mut self) -> Result<u32, PatternError> {
        if self.eat('{') {
            let start = self.pos;
            while let Some(c) = self.peek() {
                if c == '}' {
                    break;
                }
                self.pos += 1;
            }
            let s: String = self.chars[start..self.pos].iter().collect();
            if !self.eat('}') {
                return Err(self.syntax("unterminated \\u{"));
            }
            return u32::from_str_radix(&s, 16)
                .ok()
                .filter(|v| *v <= super::MAX_CODE_POINT)
                .ok_or_else(|| self.syntax("bad \\u{} escape"));
        }
        let Some(hi) = self.hex(4) else {
            return Ok('u' as u32);
        };
        if (0xD800..0xDC00).contains(&hi) && self.peek() == Some('\\') && self.peek_at(1) == Some('u') {
            let save = self.pos;
            self.pos += 2;
            if let Some(lo) = self.hex(4) {
                if (0xDC00..0xE000).contains(&lo) {
                    return Ok(0x10000 + ((hi - 0xD800) << 10) + (lo - 0xDC00));
                }
            }
            self.pos = save;
        }
        Ok(hi)
    }

    /// Escapes shared by atoms and classes. Returns `None` for letters that
    /// are handled differently in the two contexts.
    fn common_escape(&mut self, c: char) -> Result<Option<ClassAtom>, PatternError> {
        Ok(Some(match c {
            'd' => ClassAtom::Set(digit_ranges()),
            'D' => ClassAtom::Set(complement_ranges(&digit_ranges())),
            'w' => ClassAtom::Set(word_ranges()),
            'W' => ClassAtom::Set(complement_ranges(&word_ranges())),
            's' => ClassAtom::Set(space_ranges()),
            'S' => ClassAtom::Set(complement_ranges(&space_ranges())),
            't' => ClassAtom::Char(0x09),
            'n' => ClassAtom::Char(0x0A),
            'v' => ClassAtom::Char(0x0B),
            'f' => ClassAtom::Char(0x0C),
            'r' => ClassAtom::Char(0x0D),
            '0' if !matches!(self.peek(), Some('0'..='9')) => ClassAtom::Char(0),
            'c' => match self.peek() {
                Some(l) if l.is_ascii_alphabetic() => {
                    self.pos += 1;
                    ClassAtom::Char(l as u32 % 32)
                }
                _ => ClassAtom::Char('\\' as u32),
            },
            'x' => match self.hex(2) {
                Some(v) => ClassAtom::Char(v),
                None => ClassAtom::Char('x' as u32),
            },
            'u' => ClassAtom::Char(self.unicode_escape()?),
            'p' | 'P' if self.peek() == Some('{') => return Err(self.unsupported("Unicode property escape")),
            _ => return Ok(None),
        }))
    }

    fn atom_escape(&mut self) -> Result<Pattern, PatternError> {
        let c = self.peek().ok_or_else(|| self.syntax("trailing backslash"))?;
        self.pos += 1;
        match c {
            'b' | 'B' => return Err(self.unsupported("word boundary assertion")),
            '1'..='9' => return Err(self.unsupported("back-reference")),
            'k' if self.peek() == Some('<') => return Err(self.unsupported("named back-reference")),
            _ => {}
        }
        match self.common_escape(c)? {
            Some(ClassAtom::Set(r)) => Ok(Pattern::Class(shorthand_class(c, r))),
            Some(ClassAtom::Char(cp)) => Ok(char_pattern(cp)),
            None => Ok(Pattern::Char(c)),
        }
    }

    fn class_atom(&mut self) -> Result<ClassAtom, PatternError> {
        let c = self.peek().ok_or_else(|| self.syntax("unterminated class"))?;
        self.pos += 1;
        if c != '\\' {
            return Ok(ClassAtom::Char(c as u32));
        }
        let e = self.peek().ok_or_else(|| self.syntax("trailing backslash"))?;
        self.pos += 1;
        if e == 'b' {
            return Ok(ClassAtom::Char(0x08));
        }
        if e.is_ascii_digit() {
            return Err(self.unsupported("octal escape in class"));
        }
        Ok(self.common_escape(e)?.unwrap_or(ClassAtom::Char(e as u32)))
    }

    fn class(&mut self) -> Result<Pattern, PatternError> {
        let negated = self.eat('^');
        let mut ranges = Vec::new();
        loop {
            match self.peek() {
                None => return Err(self.syntax("unterminated class")),
                Some(']') => {
                    self.pos += 1;
                    break;
                }
                _ => {}
            }
            let first = self.class_atom()?;
            let is_range = self.peek() == Some('-') && !matches!(self.peek_at(1), Some(']') | None);
            match first {
                ClassAtom::Char(a) if is_range => {
                    self.pos += 1;
                    match self.class_atom()? {
                        ClassAtom::Char(b) => {
                            if b < a {
                                return Err(self.syntax("range out of order in class"));
                            }
                            ranges.push((a, b));
                        }
                        ClassAtom::Set(r) => {
                            ranges.push((a, a));
                            ranges.push(('-' as u32, '-' as u32));
                            ranges.extend(r);
                        }
                    }
                }
                ClassAtom::Char(a) => ranges.push((a, a)),
                ClassAtom::Set(r) => ranges.extend(r),
            }
        }
        let cls = if negated {
            CharClass::negated(ranges)
        } else {
            CharClass::new(ranges)
        };
        if cls.ranges.is_empty() {
            return Ok(Pattern::Empty);
        }
        Ok(Pattern::Class(cls))
    }
}

fn shorthand_class(c: char, ranges: Vec<(u32, u32)>) -> CharClass {
    if c.is_ascii_uppercase() {
        CharClass::negated(complement_ranges(&ranges))
    } else {
        CharClass::new(ranges)
    }
}

fn char_pattern(cp: u32) -> Pattern {
    match char::from_u32(cp) {
        Some(c) => Pattern::Char(c),
        // A lone surrogate can never occur in a Rust string.
        None => Pattern::Empty,
    }
}
