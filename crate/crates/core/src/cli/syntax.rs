//! Text syntax for functors, path shapes, transformation terms and modal
//! formulas. Each parser inverts the corresponding `Display` impl.
//!
//! ```text
//! functor ::= prod ('+' prod)*
//! prod    ::= exp ('*' exp)*
//! exp     ::= atom ('^' '{' names '}')*
//! atom    ::= 'Id' | 'B' '{' names '}' | 'Pow' ['(' functor ')'] | '(' functor ')'
//!
//! shape   ::= comp ('*' comp)*
//! comp    ::= satom ['.' comp]
//! satom   ::= 'Id' | 'F' ['^' n] | '(' shape ')'
//!
//! term    ::= tatom ['.' term]
//! tatom   ::= 'id' | 'out' | 'singleton' | 'empty' | 'union' | 'binunion'
//!           | 'strength' | 'insert' | 'proj' '(' n ')' | 'der' '(' name ')'
//!           | 'pi' '(' name ')' | 'tuple' '(' term (',' term)* ')'
//!           | 'whisker' '(' shape-or-functor ',' term ')' | '(' term ')'
//!
//! formula ::= fatom ('|' fatom)*
//! fatom   ::= 'p' | 'false' | 'dia' '(' formula ')' | '(' formula ')'
//! ```

use crate::constraints::{Layer, NatTerm, PathShape};
use crate::error::{Error, Result};
use crate::functor::{Carrier, FunctorExpr};
use crate::modal::NatForm;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Sym(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, k) = (line, col);
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            chars.next();
            col += 1;
        } else if is_word_char(c) {
            let mut w = String::new();
            while let Some(&d) = chars.peek() {
                if !is_word_char(d) {
                    break;
                }
                w.push(d);
                chars.next();
                col += 1;
            }
            out.push(Token {
                tok: Tok::Word(w),
                line: l,
                col: k,
            });
        } else {
            chars.next();
            col += 1;
            out.push(Token {
                tok: Tok::Sym(c),
                line: l,
                col: k,
            });
        }
    }
    out.push(Token {
        tok: Tok::End,
        line,
        col,
    });
    out
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Self {
        Parser { toks: lex(src), pos: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn error(&self, expected: &[&str]) -> Error {
        let t = &self.toks[self.pos];
        Error::Parse {
            line: t.line,
            col: t.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.error(&[&format!("'{c}'")]))
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Word(x) if x == w)
    }

    fn word(&mut self, what: &str) -> Result<String> {
        match self.peek().clone() {
            Tok::Word(w) => {
                self.bump();
                Ok(w)
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn number(&mut self) -> Result<usize> {
        match self.peek().clone() {
            Tok::Word(w) if w.chars().all(|c| c.is_ascii_digit()) => {
                self.bump();
                w.parse().map_err(|_| self.error(&["number"]))
            }
            _ => Err(self.error(&["number"])),
        }
    }

    fn finish(&self) -> Result<()> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }

    fn names(&mut self) -> Result<Carrier> {
        self.expect_sym('{')?;
        let mut names = Vec::new();
        if !self.eat_sym('}') {
            loop {
                names.push(self.word("name")?);
                if self.eat_sym('}') {
                    break;
                }
                if !self.eat_sym(',') {
                    return Err(self.error(&["','", "'}'"]));
                }
            }
        }
        Carrier::new(names)
    }

    fn functor(&mut self) -> Result<FunctorExpr> {
        let mut parts = vec![self.product()?];
        while self.eat_sym('+') {
            parts.push(self.product()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            FunctorExpr::Coprod(parts)
        })
    }

    fn product(&mut self) -> Result<FunctorExpr> {
        let mut parts = vec![self.exponent()?];
        while self.eat_sym('*') {
            parts.push(self.exponent()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            FunctorExpr::Prod(parts)
        })
    }

    fn exponent(&mut self) -> Result<FunctorExpr> {
        let mut f = self.functor_atom()?;
        while self.eat_sym('^') {
            let a = self.names()?;
            f = FunctorExpr::Exp(a, Box::new(f));
        }
        Ok(f)
    }

    fn functor_atom(&mut self) -> Result<FunctorExpr> {
        const EXPECTED: [&str; 4] = ["'Id'", "'B'", "'Pow'", "'('"];
        match self.peek().clone() {
            Tok::Word(w) if w == "Id" => {
                self.bump();
                Ok(FunctorExpr::Identity)
            }
            Tok::Word(w) if w == "B" => {
                self.bump();
                Ok(FunctorExpr::Const(self.names()?))
            }
            Tok::Word(w) if w == "Pow" => {
                self.bump();
                if self.eat_sym('(') {
                    let g = self.functor()?;
                    self.expect_sym(')')?;
                    Ok(FunctorExpr::Pow(Box::new(g)))
                } else {
                    Ok(FunctorExpr::powerset())
                }
            }
            Tok::Sym('(') => {
                self.bump();
                let g = self.functor()?;
                self.expect_sym(')')?;
                Ok(g)
            }
            _ => Err(self.error(&EXPECTED)),
        }
    }

    fn shape(&mut self) -> Result<PathShape> {
        let mut parts = vec![self.shape_comp()?];
        while self.eat_sym('*') {
            parts.push(self.shape_comp()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            PathShape::Prod(parts)
        })
    }

    fn shape_comp(&mut self) -> Result<PathShape> {
        let outer = self.shape_atom()?;
        if self.eat_sym('.') {
            Ok(PathShape::compose(outer, self.shape_comp()?))
        } else {
            Ok(outer)
        }
    }

    fn shape_atom(&mut self) -> Result<PathShape> {
        match self.peek().clone() {
            Tok::Word(w) if w == "Id" => {
                self.bump();
                Ok(PathShape::Id)
            }
            Tok::Word(w) if w == "F" => {
                self.bump();
                if self.eat_sym('^') {
                    Ok(PathShape::power(self.number()?))
                } else {
                    Ok(PathShape::F)
                }
            }
            Tok::Sym('(') => {
                self.bump();
                let s = self.shape()?;
                self.expect_sym(')')?;
                Ok(s)
            }
            _ => Err(self.error(&["'Id'", "'F'", "'('"])),
        }
    }

    /// A whisker layer: a path shape when it parses as one up to the next
    /// `,`, otherwise a closed functor.
    fn layer(&mut self) -> Result<Layer> {
        let start = self.pos;
        if let Ok(s) = self.shape() {
            if *self.peek() == Tok::Sym(',') {
                return Ok(Layer::Shape(s));
            }
        }
        self.pos = start;
        Ok(Layer::Functor(self.functor()?))
    }

    fn term(&mut self) -> Result<NatTerm> {
        let outer = self.term_atom()?;
        if self.eat_sym('.') {
            Ok(NatTerm::comp(outer, self.term()?))
        } else {
            Ok(outer)
        }
    }

    fn term_atom(&mut self) -> Result<NatTerm> {
        const EXPECTED: [&str; 14] = [
            "'id'",
            "'out'",
            "'singleton'",
            "'empty'",
            "'union'",
            "'binunion'",
            "'strength'",
            "'insert'",
            "'proj'",
            "'der'",
            "'pi'",
            "'tuple'",
            "'whisker'",
            "'('",
        ];
        let w = match self.peek().clone() {
            Tok::Sym('(') => {
                self.bump();
                let t = self.term()?;
                self.expect_sym(')')?;
                return Ok(t);
            }
            Tok::Word(w) => w,
            _ => return Err(self.error(&EXPECTED)),
        };
        let simple = match w.as_str() {
            "id" => Some(NatTerm::Id),
            "out" => Some(NatTerm::Out),
            "singleton" => Some(NatTerm::Singleton),
            "empty" => Some(NatTerm::Empty),
            "union" => Some(NatTerm::Union),
            "binunion" => Some(NatTerm::BinUnion),
            "strength" => Some(NatTerm::Strength),
            "insert" => Some(NatTerm::Insert),
            _ => None,
        };
        if let Some(t) = simple {
            self.bump();
            return Ok(t);
        }
        let t = match w.as_str() {
            "proj" => {
                self.bump();
                self.expect_sym('(')?;
                NatTerm::Proj(self.number()?)
            }
            "der" => {
                self.bump();
                self.expect_sym('(')?;
                NatTerm::Der(self.word("letter")?)
            }
            "pi" => {
                self.bump();
                self.expect_sym('(')?;
                NatTerm::PiLetter(self.word("letter")?)
            }
            "tuple" => {
                self.bump();
                self.expect_sym('(')?;
                let mut ts = vec![self.term()?];
                while self.eat_sym(',') {
                    ts.push(self.term()?);
                }
                NatTerm::Tuple(ts)
            }
            "whisker" => {
                self.bump();
                self.expect_sym('(')?;
                let layer = self.layer()?;
                self.expect_sym(',')?;
                NatTerm::whisker(layer, self.term()?)
            }
            _ => return Err(self.error(&EXPECTED)),
        };
        self.expect_sym(')')?;
        Ok(t)
    }

    fn formula(&mut self) -> Result<NatForm> {
        let mut f = self.formula_atom()?;
        while self.eat_sym('|') {
            f = NatForm::or(f, self.formula_atom()?);
        }
        Ok(f)
    }

    fn formula_atom(&mut self) -> Result<NatForm> {
        if self.is_word("p") {
            self.bump();
            Ok(NatForm::P)
        } else if self.is_word("false") {
            self.bump();
            Ok(NatForm::Bot)
        } else if self.is_word("dia") {
            self.bump();
            self.expect_sym('(')?;
            let f = self.formula()?;
            self.expect_sym(')')?;
            Ok(NatForm::dia(f))
        } else if self.eat_sym('(') {
            let f = self.formula()?;
            self.expect_sym(')')?;
            Ok(f)
        } else {
            Err(self.error(&["'p'", "'false'", "'dia'", "'('"]))
        }
    }
}

fn whole<T>(src: &str, f: impl FnOnce(&mut Parser) -> Result<T>) -> Result<T> {
    let mut p = Parser::new(src);
    let v = f(&mut p)?;
    p.finish()?;
    Ok(v)
}

pub fn parse_functor(src: &str) -> Result<FunctorExpr> {
    let f = whole(src, Parser::functor)?;
    f.validate()?;
    Ok(f)
}

pub fn parse_shape(src: &str) -> Result<PathShape> {
    whole(src, Parser::shape)
}

pub fn parse_term(src: &str) -> Result<NatTerm> {
    whole(src, Parser::term)
}

pub fn parse_formula(src: &str) -> Result<NatForm> {
    whole(src, Parser::formula)
}
