//! Backtracking matcher for the ECMA-262 subset, used as an oracle for the
//! automaton construction. Search semantics: a match may start anywhere.

#[derive(Debug, Clone)]
enum Node {
    Char(char),
    Dot,
    Class { ranges: Vec<(u32, u32)>, negated: bool },
    Start,
    End,
    Seq(Vec<Node>),
    Alt(Vec<Node>),
    Rep(Box<Node>, u32, Option<u32>),
}

pub struct Backtrack {
    root: Node,
}

const LINE_TERMINATORS: [u32; 4] = [0x0A, 0x0D, 0x2028, 0x2029];

fn digit() -> Vec<(u32, u32)> {
    vec![(0x30, 0x39)]
}

fn word() -> Vec<(u32, u32)> {
    vec![(0x30, 0x39), (0x41, 0x5A), (0x5F, 0x5F), (0x61, 0x7A)]
}

fn space() -> Vec<(u32, u32)> {
    vec![
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
    ]
}

struct P {
    c: Vec<char>,
    i: usize,
}

impl P {
    fn peek(&self) -> Option<char> {
        self.c.get(self.i).copied()
    }

    fn eat(&mut self, ch: char) -> bool {
        if self.peek() == Some(ch) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn alt(&mut self) -> Node {
        let mut v = vec![self.seq()];
        while self.eat('|') {
            v.push(self.seq());
        }
        if v.len() == 1 {
            v.pop().unwrap()
        } else {
            Node::Alt(v)
        }
    }

    fn seq(&mut self) -> Node {
        let mut v = Vec::new();
        while let Some(ch) = self.peek() {
            if ch == '|' || ch == ')' {
                break;
            }
            let atom = self.atom();
            v.push(self.quant(atom));
        }
        Node::Seq(v)
    }

    fn number(&mut self) -> Option<u32> {
        let start = self.i;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.i += 1;
        }
        self.c[start..self.i].iter().collect::<String>().parse().ok()
    }

    fn quant(&mut self, atom: Node) -> Node {
        let (lo, hi) = match self.peek() {
            Some('*') => (0, None),
            Some('+') => (1, None),
            Some('?') => (0, Some(1)),
            Some('{') => {
                let save = self.i;
                self.i += 1;
                let Some(lo) = self.number() else {
                    self.i = save;
                    return atom;
                };
                let hi = if self.eat(',') {
                    if self.peek() == Some('}') {
                        None
                    } else {
                        self.number()
                    }
                } else {
                    Some(lo)
                };
                if self.peek() != Some('}') {
                    self.i = save;
                    return atom;
                }
                (lo, hi)
            }
            _ => return atom,
        };
        self.i += 1;
        self.eat('?');
        Node::Rep(Box::new(atom), lo, hi)
    }

    fn escape(&mut self) -> Node {
        let ch = self.peek().unwrap();
        self.i += 1;
        match ch {
            'd' => Node::Class {
                ranges: digit(),
                negated: false,
            },
            'D' => Node::Class {
                ranges: digit(),
                negated: true,
            },
            'w' => Node::Class {
                ranges: word(),
                negated: false,
            },
            'W' => Node::Class {
                ranges: word(),
                negated: true,
            },
            's' => Node::Class {
                ranges: space(),
                negated: false,
            },
            'S' => Node::Class {
                ranges: space(),
                negated: true,
            },
            c => Node::Char(self.escaped_char(c)),
        }
    }

    fn escaped_char(&mut self, c: char) -> char {
        match c {
            'n' => '\n',
            't' => '\t',
            'r' => '\r',
            'f' => '\u{c}',
            'v' => '\u{b}',
            '0' => '\0',
            'u' => {
                let hex: String = if self.eat('{') {
                    let s: String = self.c[self.i..].iter().take_while(|c| **c != '}').collect();
                    self.i += s.len() + 1;
                    s
                } else {
                    let s: String = self.c[self.i..self.i + 4].iter().collect();
                    self.i += 4;
                    s
                };
                char::from_u32(u32::from_str_radix(&hex, 16).unwrap()).unwrap()
            }
            'x' => {
                let s: String = self.c[self.i..self.i + 2].iter().collect();
                self.i += 2;
                char::from_u32(u32::from_str_radix(&s, 16).unwrap()).unwrap()
            }
            c => c,
        }
    }

    fn class(&mut self) -> Node {
        let negated = self.eat('^');
        let mut ranges = Vec::new();
        let mut first = true;
        while first || self.peek() != Some(']') {
            first = false;
            if self.peek() == Some(']') {
                break;
            }
            let lo = match self.class_atom() {
                Err(set) => {
                    ranges.extend(set);
                    continue;
                }
                Ok(c) => c,
            };
            if self.peek() == Some('-') && self.c.get(self.i + 1).is_some_and(|c| *c != ']') {
                self.i += 1;
                match self.class_atom() {
                    Ok(hi) => ranges.push((lo, hi)),
                    Err(set) => {
                        ranges.push((lo, lo));
                        ranges.push(('-' as u32, '-' as u32));
                        ranges.extend(set);
                    }
                }
            } else {
                ranges.push((lo, lo));
            }
        }
        self.i += 1;
        Node::Class { ranges, negated }
    }

    /// A single code point, or a whole set for `\d` and friends.
    fn class_atom(&mut self) -> Result<u32, Vec<(u32, u32)>> {
        let ch = self.peek().unwrap();
        self.i += 1;
        if ch != '\\' {
            return Ok(ch as u32);
        }
        let e = self.peek().unwrap();
        self.i += 1;
        match e {
            'd' => Err(digit()),
            'w' => Err(word()),
            's' => Err(space()),
            'D' | 'W' | 'S' => {
                let base = match e {
                    'D' => digit(),
                    'W' => word(),
                    _ => space(),
                };
                Err(complement(&base))
            }
            'b' => Ok(8),
            c => Ok(self.escaped_char(c) as u32),
        }
    }

    fn atom(&mut self) -> Node {
        let ch = self.peek().unwrap();
        self.i += 1;
        match ch {
            '.' => Node::Dot,
            '^' => Node::Start,
            '$' => Node::End,
            '\\' => self.escape(),
            '[' => self.class(),
            '(' => {
                if self.eat('?') {
                    assert!(self.eat(':'), "only (?: groups");
                }
                let inner = self.alt();
                assert!(self.eat(')'));
                inner
            }
            c => Node::Char(c),
        }
    }
}

fn complement(r: &[(u32, u32)]) -> Vec<(u32, u32)> {
    let mut r = r.to_vec();
    r.sort();
    let mut out = Vec::new();
    let mut next = 0;
    for (a, b) in r {
        if a > next {
            out.push((next, a - 1));
        }
        next = next.max(b + 1);
    }
    if next <= 0x10FFFF {
        out.push((next, 0x10FFFF));
    }
    out
}

impl Backtrack {
    pub fn new(src: &str) -> Backtrack {
        let mut p = P {
            c: src.chars().collect(),
            i: 0,
        };
        let root = p.alt();
        assert_eq!(p.i, p.c.len(), "trailing input in {src}");
        Backtrack { root }
    }

    pub fn is_match(&self, s: &str) -> bool {
        let c: Vec<char> = s.chars().collect();
        (0..=c.len()).any(|start| m(&self.root, &c, start, &mut |_| true))
    }
}

fn m(n: &Node, s: &[char], i: usize, k: &mut dyn FnMut(usize) -> bool) -> bool {
    match n {
        Node::Char(c) => s.get(i) == Some(c) && k(i + 1),
        Node::Dot => s.get(i).is_some_and(|c| !LINE_TERMINATORS.contains(&(*c as u32))) && k(i + 1),
        Node::Class { ranges, negated } => {
            s.get(i)
                .is_some_and(|c| ranges.iter().any(|(a, b)| (*a..=*b).contains(&(*c as u32))) != *negated)
                && k(i + 1)
        }
        Node::Start => i == 0 && k(i),
        Node::End => i == s.len() && k(i),
        Node::Seq(v) => seq(v, s, i, k),
        Node::Alt(v) => v.iter().any(|x| m(x, s, i, k)),
        Node::Rep(x, lo, hi) => rep(x, *lo, *hi, s, i, k),
    }
}

fn seq(v: &[Node], s: &[char], i: usize, k: &mut dyn FnMut(usize) -> bool) -> bool {
    match v.split_first() {
        None => k(i),
        Some((h, t)) => m(h, s, i, &mut |j| seq(t, s, j, k)),
    }
}

fn rep(x: &Node, lo: u32, hi: Option<u32>, s: &[char], i: usize, k: &mut dyn FnMut(usize) -> bool) -> bool {
    if lo > 0 {
        return m(x, s, i, &mut |j| rep(x, lo - 1, hi.map(|h| h - 1), s, j, k));
    }
    if hi == Some(0) {
        return k(i);
    }
    // an iteration that consumes nothing ends the loop
    m(x, s, i, &mut |j| j > i && rep(x, 0, hi.map(|h| h - 1), s, j, k)) || k(i)
}
