//! Text parsers. Offsets in errors are byte offsets into the input.

use crate::ck::{Forest, RootedTree};
use crate::error::ParseError;
use crate::lincomb::LinComb;
use crate::loops::LoopGraph;
use crate::perm::Perm;
use crate::scalar::Scalar;
use crate::tree::{graft, perm_to_tree, Tree};

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.pos, message)
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(x) if x == c => {
                self.bump();
                Ok(())
            }
            Some(x) => Err(self.err(format!("expected '{c}', found '{x}'"))),
            None => Err(self.err(format!("expected '{c}', found end of input"))),
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.err(format!("unexpected '{c}'"))),
        }
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| ParseError::new(start, "expected a number"))
    }

    fn tree(&mut self) -> Result<Tree, ParseError> {
        match self.peek() {
            Some('|') => {
                self.bump();
                Ok(Tree::Leaf)
            }
            Some('(') => {
                self.bump();
                let l = self.tree()?;
                self.expect(',')?;
                let r = self.tree()?;
                self.expect(')')?;
                Ok(graft(&l, &r))
            }
            Some(c) => Err(self.err(format!("expected '|' or '(', found '{c}'"))),
            None => Err(self.err("expected a tree, found end of input")),
        }
    }

    fn perm(&mut self) -> Result<Perm, ParseError> {
        let start = self.pos;
        let images = if self.eat("e") {
            Vec::new()
        } else if self.peek() == Some('[') {
            self.bump();
            let mut v = vec![self.number()?];
            while self.peek() == Some(',') {
                self.bump();
                v.push(self.number()?);
            }
            self.expect(']')?;
            v
        } else {
            let mut v = Vec::new();
            while let Some(d) = self.peek().and_then(|c| c.to_digit(10)) {
                self.bump();
                v.push(d as usize);
            }
            if v.is_empty() {
                return Err(self.err("expected a permutation"));
            }
            v
        };
        Perm::new(images).map_err(|e| ParseError::new(start, e.to_string()))
    }

    fn rooted(&mut self) -> Result<RootedTree, ParseError> {
        self.expect('•')?;
        let mut children = Vec::new();
        if self.peek() == Some('[') {
            self.bump();
            children.push(self.rooted()?);
            while self.peek() == Some(',') {
                self.bump();
                children.push(self.rooted()?);
            }
            self.expect(']')?;
        }
        Ok(RootedTree::with_children(children))
    }

    /// A tree in `(|,|)` form, a permutation name `(132)` or `e`.
    fn tree_atom(&mut self) -> Result<Tree, ParseError> {
        if self.eat("e") {
            return Ok(Tree::Leaf);
        }
        let rest = self.rest();
        if rest.starts_with('(') && rest[1..].starts_with(|c: char| c.is_ascii_digit() || c == '[') {
            self.bump();
            let p = self.perm()?;
            self.expect(')')?;
            return Ok(perm_to_tree(&p));
        }
        self.tree()
    }

    fn coefficient<R: Scalar>(&mut self) -> Result<Option<R>, ParseError> {
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_digit() || c == '/' || c == '.'))
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Ok(None);
        }
        let text = &self.rest()[..len];
        let value = R::parse_text(text).ok_or_else(|| ParseError::new(start, format!("bad coefficient '{text}'")))?;
        self.pos += len;
        self.skip_ws();
        self.expect('*')?;
        self.skip_ws();
        Ok(Some(value))
    }
}

/// `Tree := "|" | "(" Tree "," Tree ")"`.
pub fn parse_tree(text: &str) -> Result<Tree, ParseError> {
    let mut c = Cursor::new(text);
    c.skip_ws();
    let t = c.tree()?;
    c.finish()?;
    Ok(t)
}

/// `"312"`, `"e"` or `"[1,10,2,…]"`.
pub fn parse_perm(text: &str) -> Result<Perm, ParseError> {
    let mut c = Cursor::new(text);
    c.skip_ws();
    let p = c.perm()?;
    c.finish()?;
    Ok(p)
}

/// `"(|,|);loops=[(0,1)]"`; a bare tree has no loops.
pub fn parse_graph(text: &str) -> Result<LoopGraph, ParseError> {
    let mut c = Cursor::new(text);
    c.skip_ws();
    let base = c.tree()?;
    c.skip_ws();
    let mut loops = Vec::new();
    let start = c.pos;
    if c.eat(";") {
        c.skip_ws();
        if !c.eat("loops=[") {
            return Err(c.err("expected 'loops=['"));
        }
        while c.peek() == Some('(') {
            c.bump();
            let a = c.number()?;
            c.expect(',')?;
            let b = c.number()?;
            c.expect(')')?;
            loops.push((a, b));
            if c.peek() == Some(',') {
                c.bump();
            }
        }
        c.expect(']')?;
    }
    c.finish()?;
    LoopGraph::new(base, loops).map_err(|e| ParseError::new(start, e.to_string()))
}

/// Space-separated rooted trees `•[•,•] •`; `∅` is the empty forest.
pub fn parse_forest(text: &str) -> Result<Forest, ParseError> {
    let mut c = Cursor::new(text);
    c.skip_ws();
    if c.eat("∅") {
        c.finish()?;
        return Ok(Forest::empty());
    }
    let mut trees = vec![c.rooted()?];
    c.skip_ws();
    while c.peek().is_some() {
        trees.push(c.rooted()?);
        c.skip_ws();
    }
    Ok(Forest(trees))
}

/// `c1*T1 + c2*T2 - T3`, each `T` a tree in `(|,|)` form or a permutation
/// name such as `(132)` or `e`. A lone `0` is the zero combination.
pub fn parse_tree_comb<R: Scalar>(text: &str) -> Result<LinComb<Tree, R>, ParseError> {
    if text.trim() == "0" {
        return Ok(LinComb::zero());
    }
    let mut c = Cursor::new(text);
    let mut out = LinComb::zero();
    c.skip_ws();
    let mut sign = R::one();
    if c.eat("-") {
        sign = -sign;
        c.skip_ws();
    }
    loop {
        let coeff = c.coefficient::<R>()?.unwrap_or_else(R::one);
        let t = c.tree_atom()?;
        out.add_term(t, sign.clone() * coeff);
        c.skip_ws();
        if c.eat("+") {
            sign = R::one();
        } else if c.eat("-") {
            sign = -R::one();
        } else {
            break;
        }
        c.skip_ws();
    }
    c.finish()?;
    Ok(out)
}
